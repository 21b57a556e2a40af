#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace semaclaw {

/// A Markdown document with an optional YAML header ("---\n<yaml>\n---\n<body>").
/// Header values are exposed as JSON (maps, sequences, scalars as strings).
struct FrontmatterDoc {
    std::optional<nlohmann::ordered_json> header;
    std::string body;
};

/// A header is recognized only when the document opens with a `---` line,
/// a later `---` line closes it, and the enclosed text is a YAML mapping.
/// Otherwise the whole input is the body.
FrontmatterDoc parse_frontmatter(std::string_view content);

std::string render_frontmatter(const nlohmann::ordered_json& header, std::string_view body);

}  // namespace semaclaw
