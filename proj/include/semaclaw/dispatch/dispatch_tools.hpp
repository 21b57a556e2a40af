#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "semaclaw/context/registry.hpp"
#include "semaclaw/dispatch/bridge.hpp"
#include "semaclaw/extend/tools.hpp"

namespace semaclaw::dispatch {

/// create_parent, dispatch_task and list_agents. These read and write only the
/// state file (and the agent registry), never in-memory daemon state.
class DispatchToolService {
public:
    DispatchToolService(std::filesystem::path state_file, std::filesystem::path data_root, Clock& clock);

    /// Throws semaclaw::Error for bad arguments and unknown tools.
    std::string handle(const std::string& tool, const extend::ToolCallContext& ctx, const nlohmann::json& args);

private:
    StateStore store_;
    context::AgentRegistry agents_;
    Clock& clock_;
};

/// How to reach the tool subprocess: `<exe> dispatch-tool --data-root <root>
/// --state-file <state>` with {"tool", "agent", "session_id", "workspace",
/// "args"} on stdin.
struct ToolProcess {
    std::filesystem::path executable;
    std::filesystem::path data_root;
    std::filesystem::path state_file;
};

/// Registers the three state-file tools. With `process` set, each call runs in
/// a child process; otherwise `service` handles it in-process.
void register_dispatch_tools(extend::ToolRegistry& tools, DispatchToolService& service,
                             std::optional<ToolProcess> process = std::nullopt);

/// dispatch_wait {task_id}: blocks on the bridge, heartbeating the admin.
void register_dispatch_wait_tool(extend::ToolRegistry& tools, DispatchBridge& bridge);

/// Body of the `dispatch-tool` subcommand. Returns the exit status.
int run_dispatch_tool_process(const std::filesystem::path& data_root, const std::filesystem::path& state_file,
                              std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace semaclaw::dispatch
