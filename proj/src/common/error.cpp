#include "semaclaw/common/error.hpp"

namespace semaclaw {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
        case Errc::not_found: return "not_found";
        case Errc::invalid_state: return "invalid_state";
        case Errc::validation: return "validation";
        case Errc::argument: return "argument";
        case Errc::io: return "io";
        case Errc::already_resolved: return "already_resolved";
        case Errc::invalid_variant: return "invalid_variant";
        case Errc::ambiguity: return "ambiguity";
        case Errc::lock_contention: return "lock_contention";
        case Errc::wait_timeout: return "wait_timeout";
        case Errc::config: return "config";
        case Errc::adapter: return "adapter";
    }
    return "unknown";
}

std::optional<Errc> errc_from_string(std::string_view s) noexcept {
    for (int i = 0; i <= static_cast<int>(Errc::adapter); ++i) {
        auto code = static_cast<Errc>(i);
        if (to_string(code) == s) return code;
    }
    return std::nullopt;
}

}  // namespace semaclaw
