#include "semaclaw/extend/schema.hpp"

#include "semaclaw/common/error.hpp"

namespace semaclaw::extend {

std::string_view to_string(ArgType t) noexcept {
    switch (t) {
        case ArgType::string: return "string";
        case ArgType::integer: return "integer";
        case ArgType::number: return "number";
        case ArgType::boolean: return "boolean";
        case ArgType::object: return "object";
        case ArgType::array: return "array";
        case ArgType::any: return "any";
    }
    return "any";
}

ArgType arg_type_from_string(std::string_view s) {
    for (auto t : {ArgType::string, ArgType::integer, ArgType::number, ArgType::boolean, ArgType::object,
                   ArgType::array, ArgType::any}) {
        if (to_string(t) == s) return t;
    }
    fail(Errc::validation, "unknown argument type '" + std::string(s) + "'");
}

namespace {

bool matches(ArgType t, const nlohmann::json& v) {
    switch (t) {
        case ArgType::string: return v.is_string();
        case ArgType::integer: return v.is_number_integer();
        case ArgType::number: return v.is_number();
        case ArgType::boolean: return v.is_boolean();
        case ArgType::object: return v.is_object();
        case ArgType::array: return v.is_array();
        case ArgType::any: return true;
    }
    return false;
}

}  // namespace

std::optional<std::string> ArgSchema::validate(const nlohmann::json& args) const {
    if (!args.is_object()) return "arguments must be a JSON object";
    for (const auto& f : fields) {
        auto it = args.find(f.name);
        if (it == args.end() || it->is_null()) {
            if (f.required) return "missing required argument '" + f.name + "'";
            continue;
        }
        if (!matches(f.type, *it)) {
            return "argument '" + f.name + "' must be of type " + std::string(to_string(f.type));
        }
    }
    for (const auto& [key, value] : args.items()) {
        bool known = false;
        for (const auto& f : fields) known = known || f.name == key;
        if (!known) return "unknown argument '" + key + "'";
    }
    return std::nullopt;
}

nlohmann::json ArgSchema::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& f : fields) {
        arr.push_back({{"name", f.name},
                       {"type", to_string(f.type)},
                       {"required", f.required},
                       {"description", f.description}});
    }
    return {{"fields", arr}};
}

ArgSchema ArgSchema::from_json(const nlohmann::json& j) {
    ArgSchema s;
    for (const auto& f : j.value("fields", nlohmann::json::array())) {
        s.fields.push_back(ArgField{f.at("name"), arg_type_from_string(f.value("type", "string")),
                                    f.value("required", false), f.value("description", "")});
    }
    return s;
}

}  // namespace semaclaw::extend
