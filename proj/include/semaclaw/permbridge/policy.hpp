#pragma once

#include <set>
#include <string>
#include <string_view>

namespace semaclaw::extend {
class ToolRegistry;
}

namespace semaclaw::permbridge {

/// internal: pre-authorized harness tools. external: needs per-invocation consent.
enum class Tier { internal, external };

std::string_view to_string(Tier t) noexcept;

/// Tools bundled with the harness: memory retrieval, workspace, dispatch,
/// scheduled tasks, outbound messages, wiki, plus the harness's own
/// ask_user / todo / skill-loading tools.
const std::set<std::string, std::less<>>& bundled_internal_tools();

bool is_bundled(std::string_view tool_name);

/// Tier of a registered tool. Throws Errc::not_found for unknown names.
Tier classify_tool(const extend::ToolRegistry& registry, std::string_view tool_name);

}  // namespace semaclaw::permbridge
