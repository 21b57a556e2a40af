#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace semaclaw::extend {

enum class ArgType { string, integer, number, boolean, object, array, any };

std::string_view to_string(ArgType t) noexcept;
ArgType arg_type_from_string(std::string_view s);

struct ArgField {
    std::string name;
    ArgType type = ArgType::string;
    bool required = false;
    std::string description;
};

/// Typed field list for tool arguments. Unknown fields are rejected.
struct ArgSchema {
    std::vector<ArgField> fields;

    /// Returns a human-readable reason when `args` does not conform.
    std::optional<std::string> validate(const nlohmann::json& args) const;

    nlohmann::json to_json() const;
    static ArgSchema from_json(const nlohmann::json& j);
};

}  // namespace semaclaw::extend
