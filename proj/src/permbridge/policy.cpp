#include "semaclaw/permbridge/policy.hpp"

#include "semaclaw/common/error.hpp"
#include "semaclaw/extend/tools.hpp"

namespace semaclaw::permbridge {

std::string_view to_string(Tier t) noexcept { return t == Tier::internal ? "internal" : "external"; }

const std::set<std::string, std::less<>>& bundled_internal_tools() {
    static const std::set<std::string, std::less<>> tools = {
        "memory_search",
        "workspace_switch", "workspace_info",
        "create_parent", "dispatch_task", "dispatch_wait", "list_agents",
        "task_add", "task_list", "task_cancel",
        "send_message",
        "wiki_tree", "wiki_mkdir", "wiki_save", "wiki_organize", "wiki_search",
        "ask_user", "todo_write", "skill_load",
    };
    return tools;
}

bool is_bundled(std::string_view tool_name) { return bundled_internal_tools().count(tool_name) != 0; }

Tier classify_tool(const extend::ToolRegistry& registry, std::string_view tool_name) {
    auto spec = registry.find(std::string(tool_name));
    if (!spec) fail(Errc::not_found, "tool '" + std::string(tool_name) + "' is not registered");
    return spec->tier;
}

}  // namespace semaclaw::permbridge
