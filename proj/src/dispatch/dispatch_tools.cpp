#include "semaclaw/dispatch/dispatch_tools.hpp"

#include <iostream>
#include <iterator>

#include "semaclaw/common/error.hpp"
#include "semaclaw/common/process.hpp"
#include "semaclaw/dispatch/roster.hpp"

namespace semaclaw::dispatch {

namespace fs = std::filesystem;

DispatchToolService::DispatchToolService(fs::path state_file, fs::path data_root, Clock& clock)
    : store_(std::move(state_file)), agents_(std::move(data_root)), clock_(clock) {}

std::string DispatchToolService::handle(const std::string& tool, const extend::ToolCallContext& ctx,
                                        const nlohmann::json& args) {
    if (tool == "list_agents") {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& e : list_agents(agents_)) rows.push_back(to_json(e));
        return rows.dump();
    }
    if (tool == "create_parent") {
        std::vector<TaskSpec> tasks;
        for (const auto& t : args.at("tasks")) tasks.push_back(task_spec_from_json(t));
        Duration timeout{args.value("default_timeout_ms", kDefaultTaskTimeout.count())};
        auto r = create_parent(store_, agents_.all(), ctx.agent_folder, args.at("goal").get<std::string>(), tasks,
                               timeout, ctx.workspace, clock_.now());
        return to_json(r).dump();
    }
    if (tool == "dispatch_task") {
        TaskSpec t;
        t.label = "task";
        t.agent_name = args.at("agent").get<std::string>();
        t.prompt = args.at("prompt").get<std::string>();
        if (args.contains("timeout_ms")) t.timeout = Duration{args["timeout_ms"].get<std::int64_t>()};
        auto goal = args.value("goal", t.prompt);
        auto r = create_parent(store_, agents_.all(), ctx.agent_folder, goal, {t}, kDefaultTaskTimeout,
                               ctx.workspace, clock_.now());
        auto j = to_json(r);
        j["task_id"] = task_ref(r.group_id, t.label);
        return j.dump();
    }
    fail(Errc::not_found, "no dispatch tool named '" + tool + "'");
}

namespace {

std::string run_in_child(const ToolProcess& p, const std::string& tool, const extend::ToolCallContext& ctx,
                         const nlohmann::json& args) {
    nlohmann::json request{{"tool", tool},
                           {"agent", ctx.agent_folder},
                           {"session_id", ctx.session_id},
                           {"workspace", ctx.workspace.string()},
                           {"args", args}};
    ProcessOptions opts;
    opts.stdin_data = request.dump();
    opts.timeout = std::chrono::seconds{60};
    auto r = run_process({p.executable.string(), "dispatch-tool", "--data-root", p.data_root.string(),
                          "--state-file", p.state_file.string()},
                         opts);
    if (r.exit_code != 0) {
        auto msg = r.err.empty() ? r.out : r.err;
        while (!msg.empty() && msg.back() == '\n') msg.pop_back();
        fail(Errc::invalid_state, tool + " failed: " + (msg.empty() ? "exit " + std::to_string(r.exit_code) : msg));
    }
    auto out = r.out;
    while (!out.empty() && out.back() == '\n') out.pop_back();
    return out;
}

}  // namespace

void register_dispatch_tools(extend::ToolRegistry& tools, DispatchToolService& service,
                             std::optional<ToolProcess> process) {
    using extend::ArgField;
    using extend::ArgType;
    auto handler_for = [&service, process](std::string name) -> extend::ToolHandler {
        return [&service, process, name](const extend::ToolCallContext& ctx, const nlohmann::json& args) {
            if (process) return run_in_child(*process, name, ctx, args);
            return service.handle(name, ctx, args);
        };
    };
    tools.register_builtin({"list_agents",
                            "List registered agents (name, folder, channel).",
                            {},
                            handler_for("list_agents"),
                            {},
                            {}});
    tools.register_builtin(
        {"create_parent",
         "Declare a goal with a dependency graph of tasks for worker agents.",
         {{ArgField{"goal", ArgType::string, true, "overall goal"},
           ArgField{"tasks", ArgType::array, true, "[{label, agent, prompt, depends_on, timeout_ms}]"},
           ArgField{"default_timeout_ms", ArgType::integer, false, "per-task timeout when unspecified"}}},
         handler_for("create_parent"),
         {nlohmann::json{{"goal", "ship"},
                         {"tasks", {{{"label", "a"}, {"agent", "reviewer"}, {"prompt", "review"}}}}}},
         {}});
    tools.register_builtin({"dispatch_task",
                            "Hand a single task to another agent.",
                            {{ArgField{"agent", ArgType::string, true, "agent name or folder"},
                              ArgField{"prompt", ArgType::string, true, "task prompt"},
                              ArgField{"goal", ArgType::string, false, "goal text, defaults to the prompt"},
                              ArgField{"timeout_ms", ArgType::integer, false, "task timeout"}}},
                            handler_for("dispatch_task"),
                            {},
                            {}});
}

void register_dispatch_wait_tool(extend::ToolRegistry& tools, DispatchBridge& bridge) {
    using extend::ArgField;
    using extend::ArgType;
    tools.register_builtin({"dispatch_wait",
                            "Wait for a dispatched task to finish and return it.",
                            {{ArgField{"task_id", ArgType::string, true, "<group>/<label>"}}},
                            [&bridge](const extend::ToolCallContext&, const nlohmann::json& args) {
                                return to_json(bridge.dispatch_wait(args.at("task_id").get<std::string>())).dump();
                            },
                            {},
                            {}});
}

int run_dispatch_tool_process(const fs::path& data_root, const fs::path& state_file, std::istream& in,
                              std::ostream& out, std::ostream& err) {
    SystemClock clock;
    try {
        std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
        auto request = nlohmann::json::parse(text);
        DispatchToolService service(state_file, data_root, clock);
        extend::ToolCallContext ctx{request.value("session_id", ""), request.value("agent", ""),
                                    request.value("workspace", "")};
        out << service.handle(request.at("tool").get<std::string>(), ctx,
                              request.value("args", nlohmann::json::object()))
            << "\n";
        return 0;
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return 1;
    }
}

}  // namespace semaclaw::dispatch
