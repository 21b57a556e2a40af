#include "semaclaw/extend/invoker.hpp"

#include "semaclaw/common/error.hpp"

namespace semaclaw::extend {

namespace {

std::string status_text(ToolStatus status, const std::string& tool, const std::string& message) {
    return nlohmann::json{{"status", to_string(status)}, {"tool", tool}, {"message", message}}.dump();
}

ToolResult failed(ToolStatus status, const std::string& tool, const std::string& message,
                  const nlohmann::json& args) {
    return ToolResult{status, status_text(status, tool, message), args, false};
}

}  // namespace

std::string_view to_string(ToolStatus s) noexcept {
    switch (s) {
        case ToolStatus::ok: return "ok";
        case ToolStatus::invalid_args: return "invalid_args";
        case ToolStatus::blocked: return "blocked";
        case ToolStatus::denied: return "denied";
        case ToolStatus::error: return "error";
        case ToolStatus::unknown_tool: return "unknown_tool";
    }
    return "error";
}

ToolResult ToolInvoker::invoke(const ToolCallContext& ctx, const std::string& name, const nlohmann::json& args,
                               const std::string& rationale, const ToolEventSink& events) const {
    if (events) events(true, {{"tool", name}, {"args", args}});
    auto result = run(ctx, name, args, rationale);
    if (events) {
        events(false, {{"tool", name},
                       {"status", to_string(result.status)},
                       {"gated", result.gated},
                       {"result", result.text}});
    }
    return result;
}

ToolResult ToolInvoker::run(const ToolCallContext& ctx, const std::string& name, const nlohmann::json& raw_args,
                            const std::string& rationale) const {
    auto spec = tools_.find(name);
    if (!spec) return failed(ToolStatus::unknown_tool, name, "no tool named '" + name + "'", raw_args);

    auto pre = hooks_.fire(HookEvent::tool_pre, {{"session_id", ctx.session_id},
                                                  {"agent", ctx.agent_folder},
                                                  {"tool", name},
                                                  {"args", raw_args}});
    nlohmann::json args = pre.payload.contains("args") ? pre.payload["args"] : raw_args;
    if (pre.verdict == Verdict::block) {
        return failed(ToolStatus::blocked, name, "blocked by a tool:pre hook", args);
    }
    if (auto err = spec->schema.validate(args)) {
        return failed(ToolStatus::invalid_args, name, *err, args);
    }

    bool gated = false;
    if (spec->tier == Tier::external) {
        gated = true;
        auto gate = hooks_.fire(HookEvent::permission_request, {{"session_id", ctx.session_id},
                                                                 {"agent", ctx.agent_folder},
                                                                 {"tool", name},
                                                                 {"args", args},
                                                                 {"rationale", rationale}});
        permbridge::Decision decision;
        if (gate.verdict == Verdict::block) {
            decision = permbridge::Decision::deny("denied by a permission:request hook");
        } else if (gate.payload.contains("decision")) {
            try {
                decision = permbridge::decision_from_json(gate.payload);
            } catch (const Error& e) {
                decision = permbridge::Decision::deny(e.what());
            }
        } else if (!bridge_) {
            decision = permbridge::Decision::deny("no approval surface is available");
        } else {
            decision = bridge_->request_tool_permission({ctx.session_id, ctx.agent_folder}, name, args, rationale);
        }
        using V = permbridge::Decision::Variant;
        if (decision.variant == V::deny || decision.variant == V::answer) {
            auto reason = decision.text.empty() ? "the user denied this tool call" : decision.text;
            auto r = failed(ToolStatus::denied, name, reason, args);
            r.gated = true;
            return r;
        }
        if (decision.variant == V::modify) {
            if (auto err = spec->schema.validate(decision.new_args)) {
                auto r = failed(ToolStatus::denied, name,
                                "modified arguments do not match the tool schema (" + *err + "); treated as deny",
                                decision.new_args);
                r.gated = true;
                return r;
            }
            args = decision.new_args;
        }
    }

    ToolResult result{ToolStatus::ok, {}, args, gated};
    try {
        result.text = spec->handler(ctx, args);
    } catch (const std::exception& e) {
        result = failed(ToolStatus::error, name, e.what(), args);
        result.gated = gated;
    } catch (...) {
        result = failed(ToolStatus::error, name, "unknown failure", args);
        result.gated = gated;
    }

    auto post = hooks_.fire(HookEvent::tool_post, {{"session_id", ctx.session_id},
                                                    {"agent", ctx.agent_folder},
                                                    {"tool", name},
                                                    {"args", args},
                                                    {"status", to_string(result.status)},
                                                    {"result", result.text}});
    if (post.payload.contains("result") && post.payload["result"].is_string()) {
        result.text = post.payload["result"].get<std::string>();
    }
    return result;
}

}  // namespace semaclaw::extend
