#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace semaclaw {

enum class Errc {
    not_found,
    invalid_state,
    validation,
    argument,
    io,
    already_resolved,
    invalid_variant,
    ambiguity,
    lock_contention,
    wait_timeout,
    config,
    adapter,
};

std::string_view to_string(Errc code) noexcept;
std::optional<Errc> errc_from_string(std::string_view s) noexcept;

/// Every module reports contract violations through this type; `code()` is
/// what the gateway maps onto HTTP status codes.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace semaclaw
