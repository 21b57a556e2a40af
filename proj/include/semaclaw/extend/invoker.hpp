#pragma once

#include <functional>
#include <string>

#include <nlohmann/json.hpp>

#include "semaclaw/extend/hooks.hpp"
#include "semaclaw/extend/tools.hpp"
#include "semaclaw/permbridge/bridge.hpp"

namespace semaclaw::extend {

enum class ToolStatus { ok, invalid_args, blocked, denied, error, unknown_tool };

std::string_view to_string(ToolStatus s) noexcept;

struct ToolResult {
    ToolStatus status = ToolStatus::ok;
    std::string text;  // handed back to the model as the tool-role message
    nlohmann::json args = nlohmann::json::object();  // arguments the handler ran with
    bool gated = false;                              // went through the permission bridge
};

/// Runtime event sink for the tool:pre / tool:post pair around one call.
using ToolEventSink = std::function<void(bool pre, const nlohmann::json& payload)>;

/// Validates, hooks, gates and runs one tool call. Never throws for tool-level
/// failures: they come back as a non-ok ToolResult.
class ToolInvoker {
public:
    ToolInvoker(const ToolRegistry& tools, const HookRegistry& hooks, permbridge::PermissionBridge* bridge)
        : tools_(tools), hooks_(hooks), bridge_(bridge) {}

    ToolResult invoke(const ToolCallContext& ctx, const std::string& name, const nlohmann::json& args,
                      const std::string& rationale = {}, const ToolEventSink& events = {}) const;

private:
    ToolResult run(const ToolCallContext& ctx, const std::string& name, const nlohmann::json& args,
                   const std::string& rationale) const;

    const ToolRegistry& tools_;
    const HookRegistry& hooks_;
    permbridge::PermissionBridge* bridge_;
};

}  // namespace semaclaw::extend
