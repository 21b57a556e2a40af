#include "semaclaw/common/frontmatter.hpp"

#include <yaml-cpp/yaml.h>

namespace semaclaw {

namespace {

nlohmann::ordered_json to_json(const YAML::Node& node) {
    switch (node.Type()) {
        case YAML::NodeType::Map: {
            auto obj = nlohmann::ordered_json::object();
            for (const auto& kv : node) obj[kv.first.as<std::string>()] = to_json(kv.second);
            return obj;
        }
        case YAML::NodeType::Sequence: {
            auto arr = nlohmann::ordered_json::array();
            for (const auto& item : node) arr.push_back(to_json(item));
            return arr;
        }
        case YAML::NodeType::Scalar:
            return node.as<std::string>();
        default:
            return nullptr;
    }
}

void emit(YAML::Emitter& out, const nlohmann::ordered_json& value) {
    if (value.is_object()) {
        out << YAML::BeginMap;
        for (const auto& [k, v] : value.items()) {
            out << YAML::Key << k << YAML::Value;
            emit(out, v);
        }
        out << YAML::EndMap;
    } else if (value.is_array()) {
        out << YAML::Flow << YAML::BeginSeq;
        for (const auto& v : value) emit(out, v);
        out << YAML::EndSeq;
    } else if (value.is_string()) {
        out << value.get<std::string>();
    } else if (value.is_null()) {
        out << YAML::Null;
    } else {
        out << value.dump();
    }
}

}  // namespace

FrontmatterDoc parse_frontmatter(std::string_view content) {
    FrontmatterDoc whole{std::nullopt, std::string(content)};
    std::size_t open_len = 0;
    if (content.starts_with("---\n")) {
        open_len = 4;
    } else if (content.starts_with("---\r\n")) {
        open_len = 5;
    } else {
        return whole;
    }

    // Closing fence is a line that is exactly "---".
    std::size_t line_start = open_len;
    while (line_start <= content.size()) {
        auto eol = content.find('\n', line_start);
        auto line_end = eol == std::string_view::npos ? content.size() : eol;
        auto line = content.substr(line_start, line_end - line_start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line == "---") {
            auto header_text = content.substr(open_len, line_start - open_len);
            auto body_start = eol == std::string_view::npos ? content.size() : eol + 1;
            try {
                auto node = YAML::Load(std::string(header_text));
                if (node.IsNull()) {
                    return FrontmatterDoc{nlohmann::ordered_json::object(),
                                          std::string(content.substr(body_start))};
                }
                if (!node.IsMap()) return whole;
                return FrontmatterDoc{to_json(node), std::string(content.substr(body_start))};
            } catch (const YAML::Exception&) {
                return whole;
            }
        }
        if (eol == std::string_view::npos) break;
        line_start = eol + 1;
    }
    return whole;
}

std::string render_frontmatter(const nlohmann::ordered_json& header, std::string_view body) {
    YAML::Emitter out;
    emit(out, header.is_object() ? header : nlohmann::ordered_json::object());
    std::string yaml = header.empty() ? std::string() : std::string(out.c_str()) + "\n";
    std::string doc = "---\n" + yaml + "---\n";
    doc.append(body);
    return doc;
}

}  // namespace semaclaw
