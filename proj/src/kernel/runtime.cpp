#include "semaclaw/kernel/runtime.hpp"

#include <algorithm>

#include "semaclaw/common/error.hpp"
#include "semaclaw/extend/invoker.hpp"
#include "semaclaw/kernel/tokens.hpp"

namespace semaclaw::kernel {

namespace fs = std::filesystem;

struct AgentRuntime::Session {
    std::string id;
    SessionConfig config;
    context::AgentIdentity identity;
    std::shared_ptr<ModelAdapter> adapter;

    std::mutex turn_mu;  // one turn or explicit compaction at a time

    mutable std::mutex ledger_mu;
    ContextLedger ledger;
    std::vector<std::string> todos;

    mutable std::mutex meta_mu;
    fs::path workspace;
    TimePoint last_activity{};
    int suspended = 0;
    std::vector<RuntimeEvent>* trace = nullptr;
};

void SessionConfig::validate() const {
    if (agent_id.empty()) fail(Errc::validation, "session needs an agent id");
    if (context_limit < kMinContextLimit) {
        fail(Errc::validation, "context_limit must be at least " + std::to_string(kMinContextLimit));
    }
    if (idle_timeout <= Duration::zero()) fail(Errc::validation, "idle_timeout must be positive");
    if (max_steps <= 0) fail(Errc::validation, "max_steps must be positive");
    if (step_retries < 0) fail(Errc::validation, "step_retries must not be negative");
}

std::string_view to_string(CompactionMode m) noexcept {
    return m == CompactionMode::summarized ? "summarized" : "truncation_fallback";
}

nlohmann::json to_json(const CompactionReport& r) {
    return {{"tokens_before", r.tokens_before},
            {"tokens_after", r.tokens_after},
            {"ratio", r.ratio},
            {"mode", to_string(r.mode)},
            {"summary_text", r.summary_text}};
}

AgentRuntime::AgentRuntime(RuntimeDeps deps) : deps_(std::move(deps)) {
    if (!deps_.clock || !deps_.bus || !deps_.agents || !deps_.memory || !deps_.tools || !deps_.hooks) {
        fail(Errc::config, "runtime is missing a required dependency");
    }
    if (!deps_.adapters) fail(Errc::config, "runtime has no adapter factory");
    if (deps_.bridge) {
        deps_.bridge->set_activity_hook(
            [this](const std::string& session_id, bool suspended) { mark_suspended(session_id, suspended); });
    }
}

AgentRuntime::~AgentRuntime() {
    if (deps_.bridge) deps_.bridge->set_activity_hook({});
}

std::shared_ptr<AgentRuntime::Session> AgentRuntime::get(const std::string& session_id) const {
    std::lock_guard lock(mu_);
    auto it = sessions_.find(session_id);
    if (it == sessions_.end()) fail(Errc::not_found, "no open session " + session_id);
    return it->second;
}

void AgentRuntime::emit(Session& s, EventKind kind, nlohmann::json payload) {
    auto ev = deps_.bus->publish(RuntimeEvent{kind, s.id, 0, deps_.clock->now(), std::move(payload)});
    std::lock_guard lock(s.meta_mu);
    if (s.trace) s.trace->push_back(std::move(ev));
}

void AgentRuntime::mark_suspended(const std::string& session_id, bool suspended) {
    std::shared_ptr<Session> s;
    {
        std::lock_guard lock(mu_);
        auto it = sessions_.find(session_id);
        if (it == sessions_.end()) return;
        s = it->second;
    }
    std::lock_guard lock(s->meta_mu);
    s->suspended += suspended ? 1 : -1;
    if (s->suspended < 0) s->suspended = 0;
    s->last_activity = deps_.clock->now();
}

std::string AgentRuntime::open_session(SessionConfig config) {
    config.validate();
    auto identity = deps_.agents->find_folder(config.agent_id);
    if (!identity) fail(Errc::not_found, "no agent with folder '" + config.agent_id + "'");
    context::ensure_agent_dirs(*identity);
    auto adapter = deps_.adapters(config, *identity);
    if (!adapter) fail(Errc::config, "no model adapter for '" + config.model_adapter_id + "'");

    auto s = std::make_shared<Session>();
    s->id = "sess-" + std::to_string(next_session_++);
    s->identity = *identity;
    s->adapter = std::move(adapter);
    s->workspace = config.workspace.value_or(identity->default_workspace);
    s->config = std::move(config);
    s->last_activity = deps_.clock->now();
    s->ledger.touch(s->last_activity);
    {
        std::lock_guard lock(mu_);
        sessions_[s->id] = s;
    }
    emit(*s, EventKind::session_start, {{"agent", s->identity.folder}, {"workspace", s->workspace.string()}});
    return s->id;
}

void AgentRuntime::close_session(const std::string& session_id) {
    std::shared_ptr<Session> s;
    {
        std::lock_guard lock(mu_);
        auto it = sessions_.find(session_id);
        if (it == sessions_.end()) fail(Errc::not_found, "no open session " + session_id);
        s = it->second;
        sessions_.erase(it);
    }
    emit(*s, EventKind::session_end, {{"agent", s->identity.folder}, {"reason", "closed"}});
}

context::PersonaBundle AgentRuntime::persona(const std::string& session_id) const {
    auto s = get(session_id);
    std::lock_guard lock(s->meta_mu);
    return context::resolve_persona(s->identity, s->workspace);
}

Message AgentRuntime::build_reminder(const Session& s) const {
    fs::path ws;
    {
        std::lock_guard lock(s.meta_mu);
        ws = s.workspace;
    }
    std::string text = "<system-reminder>\n" + context::resolve_persona(s.identity, ws).serialize();
    if (s.config.todo_enabled) {
        text += "\n";
        text += kTodoHeading;
        text += "\n";
        std::lock_guard lock(s.ledger_mu);
        if (s.todos.empty()) text += "(none)\n";
        for (const auto& t : s.todos) text += "- " + t + "\n";
    }
    text += "</system-reminder>";
    return Message{Role::user, std::move(text)};
}

ModelContext AgentRuntime::assemble_locked(const Session& s) const {
    ModelContext ctx;
    ctx.session_id = s.id;
    ctx.agent_folder = s.identity.folder;
    fs::path ws;
    {
        std::lock_guard lock(s.meta_mu);
        ws = s.workspace;
    }
    ctx.system_text = context::resolve_persona(s.identity, ws).serialize();
    if (deps_.skills) {
        auto block = deps_.skills->context_block();
        if (!block.empty()) ctx.system_text += std::string("\n") + kSkillsHeading + "\n" + block;
    }
    {
        std::lock_guard lock(s.ledger_mu);
        ctx.messages = s.ledger.messages();
    }
    for (const auto& t : deps_.tools->list()) {
        ctx.tools.push_back(ToolDescriptor{t.name, t.description, t.schema.to_json()});
    }
    return ctx;
}

ModelContext AgentRuntime::assemble_context(const std::string& session_id) const {
    return assemble_locked(*get(session_id));
}

void AgentRuntime::append_checked(Session& s, Message m) {
    bool compact_now;
    {
        std::lock_guard lock(s.ledger_mu);
        s.ledger.append(std::move(m));
        compact_now = should_compact(s.ledger.token_count(), s.config.context_limit);
    }
    if (compact_now) compact_locked(s, nullptr);
}

void AgentRuntime::compact_locked(Session& s, CompactionReport* out) {
    std::vector<Message> history;
    std::size_t before;
    {
        std::lock_guard lock(s.ledger_mu);
        if (s.ledger.empty()) fail(Errc::invalid_state, "cannot compact an empty ledger");
        before = s.ledger.token_count();
        history = s.ledger.messages();
    }
    const auto limit = s.config.context_limit;
    if (!should_compact(before, limit)) {
        fail(Errc::invalid_state, "ledger is below the compaction threshold");
    }
    emit(s, EventKind::compact_start, {{"tokens_before", before}, {"context_limit", limit}});

    const Message reminder = build_reminder(s);
    CompactionReport report;
    report.tokens_before = before;
    std::vector<Message> next;
    bool summarized = false;
    try {
        auto summary = s.adapter->summarize(history);
        next = {Message{Role::system, "[Summary of earlier conversation]\n" + summary}};
        // A user message the model has not answered yet stays verbatim.
        if (history.back().role == Role::user) next.push_back(history.back());
        next.push_back(reminder);
        auto after = count_tokens(next);
        if (!should_compact(after, limit) && after < before) {
            summarized = true;
            report.summary_text = std::move(summary);
        }
    } catch (const std::exception&) {
    }

    if (!summarized) {
        report.mode = CompactionMode::truncation_fallback;
        const Message notice{Role::system,
                             "[Earlier conversation was truncated because it no longer fit the context window]"};
        std::optional<std::size_t> keep_user;
        for (std::size_t i = history.size(); i-- > 0;) {
            if (history[i].role == Role::user) {
                keep_user = i;
                break;
            }
        }
        std::vector<std::pair<std::size_t, Message>> kept;
        for (std::size_t i = 0; i < history.size(); ++i) kept.emplace_back(i, history[i]);
        auto total = [&] {
            std::size_t t = count_tokens(notice.text) + count_tokens(reminder.text);
            for (const auto& [i, m] : kept) t += count_tokens(m.text);
            return t;
        };
        const auto target = truncation_target(limit);
        std::size_t cursor = 0;
        while (total() > target && cursor < kept.size()) {
            if (keep_user && kept[cursor].first == *keep_user) {
                ++cursor;
                continue;
            }
            kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(cursor));
        }
        next.clear();
        next.push_back(notice);
        for (auto& [i, m] : kept) next.push_back(std::move(m));
        next.push_back(reminder);
    }

    {
        std::lock_guard lock(s.ledger_mu);
        s.ledger.replace(next);
        s.ledger.note_compaction();
        report.tokens_after = s.ledger.token_count();
    }
    report.ratio = static_cast<double>(report.tokens_after) / static_cast<double>(report.tokens_before);

    auto payload = to_json(report);
    payload["agent"] = s.identity.folder;
    emit(s, EventKind::compact_exec, payload);
    deps_.hooks->fire(extend::HookEvent::compact_exec, payload);
    deps_.memory->store_for(s.identity).mark_dirty(deps_.clock->now());
    if (report.tokens_after > truncation_target(limit) && report.mode == CompactionMode::truncation_fallback) {
        emit(s, EventKind::error, {{"message", "truncation could not reach its bound"}});
    }
    if (out) *out = std::move(report);
}

CompactionReport AgentRuntime::compact(const std::string& session_id) {
    auto s = get(session_id);
    std::lock_guard turn(s->turn_mu);
    CompactionReport report;
    compact_locked(*s, &report);
    return report;
}

TurnResult AgentRuntime::submit_turn(const std::string& session_id, const std::string& user_message) {
    auto s = get(session_id);
    std::lock_guard turn(s->turn_mu);
    TurnResult result;
    {
        std::lock_guard lock(s->meta_mu);
        s->trace = &result.events;
    }
    struct TraceReset {
        Session& s;
        ~TraceReset() {
            std::lock_guard lock(s.meta_mu);
            s.trace = nullptr;
        }
    } reset{*s};

    touch(session_id);
    const auto& agent = s->identity.folder;
    emit(*s, EventKind::task_start, {{"agent", agent}, {"prompt", user_message}});

    auto finish_error = [&](const std::string& message) {
        result.ok = false;
        result.error = message;
        emit(*s, EventKind::error, {{"agent", agent}, {"message", message}});
        deps_.hooks->fire(extend::HookEvent::error, {{"session_id", s->id}, {"agent", agent}, {"message", message}});
        emit(*s, EventKind::task_done, {{"agent", agent}, {"status", "error"}});
        return result;
    };

    auto start = deps_.hooks->fire(extend::HookEvent::task_start,
                                   {{"session_id", s->id}, {"agent", agent}, {"prompt", user_message}});
    if (start.verdict == extend::Verdict::block) return finish_error("turn blocked by a task:start hook");

    deps_.memory->store_for(s->identity).append_daily_log(user_message, deps_.clock->now());
    append_checked(*s, Message{Role::user, user_message});

    extend::ToolInvoker invoker(*deps_.tools, *deps_.hooks, deps_.bridge);
    for (int step = 0; step < s->config.max_steps; ++step) {
        std::optional<StepOutcome> outcome;
        std::string last_error;
        for (int attempt = 0; attempt <= s->config.step_retries && !outcome; ++attempt) {
            try {
                outcome = s->adapter->step(assemble_locked(*s));
            } catch (const std::exception& e) {
                last_error = e.what();
            }
        }
        if (!outcome) return finish_error("model adapter failed: " + last_error);

        if (auto* reply = std::get_if<Reply>(&*outcome)) {
            append_checked(*s, Message{Role::assistant, reply->text});
            touch(session_id);
            result.reply = reply->text;
            emit(*s, EventKind::task_done, {{"agent", agent}, {"status", "ok"}, {"reply", reply->text}});
            deps_.hooks->fire(extend::HookEvent::task_done,
                              {{"session_id", s->id}, {"agent", agent}, {"reply", reply->text}});
            return result;
        }

        const auto& call = std::get<ToolCall>(*outcome);
        append_checked(*s, Message{Role::assistant,
                                   nlohmann::json{{"tool_call", {{"name", call.name}, {"args", call.args}}}}.dump()});
        extend::ToolCallContext ctx{s->id, agent, workspace(session_id)};
        auto tool_result = invoker.invoke(ctx, call.name, call.args, call.rationale,
                                          [&](bool pre, const nlohmann::json& payload) {
                                              emit(*s, pre ? EventKind::tool_pre : EventKind::tool_post, payload);
                                          });
        touch(session_id);
        append_checked(*s, Message{Role::tool, tool_result.text});
    }
    return finish_error("turn exceeded " + std::to_string(s->config.max_steps) + " steps");
}

context::PersonaBundle AgentRuntime::switch_workspace(const std::string& session_id, const fs::path& path) {
    auto s = get(session_id);
    std::error_code ec;
    if (!fs::is_directory(path, ec)) fail(Errc::not_found, "workspace " + path.string() + " does not exist");
    auto bundle = context::resolve_persona(s->identity, path);
    std::lock_guard lock(s->meta_mu);
    s->workspace = fs::absolute(path).lexically_normal();
    return bundle;
}

fs::path AgentRuntime::workspace(const std::string& session_id) const {
    auto s = get(session_id);
    std::lock_guard lock(s->meta_mu);
    return s->workspace;
}

std::vector<Message> AgentRuntime::messages(const std::string& session_id) const {
    auto s = get(session_id);
    std::lock_guard lock(s->ledger_mu);
    return s->ledger.messages();
}

std::size_t AgentRuntime::token_count(const std::string& session_id) const {
    auto s = get(session_id);
    std::lock_guard lock(s->ledger_mu);
    return s->ledger.token_count();
}

std::size_t AgentRuntime::compaction_count(const std::string& session_id) const {
    auto s = get(session_id);
    std::lock_guard lock(s->ledger_mu);
    return s->ledger.compaction_count();
}

std::vector<std::string> AgentRuntime::todos(const std::string& session_id) const {
    auto s = get(session_id);
    std::lock_guard lock(s->ledger_mu);
    return s->todos;
}

const SessionConfig& AgentRuntime::config(const std::string& session_id) const { return get(session_id)->config; }

std::string AgentRuntime::agent_of(const std::string& session_id) const { return get(session_id)->identity.folder; }

TimePoint AgentRuntime::last_activity(const std::string& session_id) const {
    auto s = get(session_id);
    std::lock_guard lock(s->meta_mu);
    return s->last_activity;
}

bool AgentRuntime::is_open(const std::string& session_id) const {
    std::lock_guard lock(mu_);
    return sessions_.count(session_id) > 0;
}

std::vector<std::string> AgentRuntime::sessions() const {
    std::lock_guard lock(mu_);
    std::vector<std::string> out;
    for (const auto& [id, s] : sessions_) out.push_back(id);
    return out;
}

std::vector<std::string> AgentRuntime::sessions_for(const std::string& agent_folder) const {
    std::lock_guard lock(mu_);
    std::vector<std::string> out;
    for (const auto& [id, s] : sessions_) {
        if (s->identity.folder == agent_folder) out.push_back(id);
    }
    return out;
}

void AgentRuntime::touch(const std::string& session_id) {
    auto s = get(session_id);
    auto now = deps_.clock->now();
    std::lock_guard lock(s->meta_mu);
    s->last_activity = now;
}

void AgentRuntime::touch_agent(const std::string& agent_folder) {
    for (const auto& id : sessions_for(agent_folder)) {
        try {
            touch(id);
        } catch (const Error&) {
        }
    }
}

std::vector<std::string> AgentRuntime::reap_idle() {
    std::vector<std::shared_ptr<Session>> reaped;
    auto now = deps_.clock->now();
    {
        std::lock_guard lock(mu_);
        for (auto it = sessions_.begin(); it != sessions_.end();) {
            auto& s = it->second;
            bool idle;
            {
                std::lock_guard meta(s->meta_mu);
                idle = s->suspended == 0 && now - s->last_activity > s->config.idle_timeout;
            }
            if (idle) {
                reaped.push_back(s);
                it = sessions_.erase(it);
            } else {
                ++it;
            }
        }
    }
    std::vector<std::string> ids;
    for (auto& s : reaped) {
        emit(*s, EventKind::session_end, {{"agent", s->identity.folder}, {"reason", "idle"}});
        ids.push_back(s->id);
    }
    return ids;
}

void AgentRuntime::register_builtin_tools() {
    using extend::ArgField;
    using extend::ArgType;
    using extend::ToolSpec;
    auto& tools = *deps_.tools;

    tools.register_builtin(ToolSpec{
        "ask_user",
        "Ask the user a clarifying question and wait for the answer.",
        {{ArgField{"question", ArgType::string, true, "question text"}}},
        [this](const extend::ToolCallContext& ctx, const nlohmann::json& args) -> std::string {
            if (!deps_.bridge) fail(Errc::invalid_state, "no approval surface is available");
            return deps_.bridge->ask_user({ctx.session_id, ctx.agent_folder}, args.at("question").get<std::string>());
        },
        {},
        {}});

    tools.register_builtin(ToolSpec{
        "todo_write",
        "Replace the session's todo list.",
        {{ArgField{"todos", ArgType::array, true, "list of todo strings"}}},
        [this](const extend::ToolCallContext& ctx, const nlohmann::json& args) -> std::string {
            auto s = get(ctx.session_id);
            std::vector<std::string> todos;
            for (const auto& t : args.at("todos")) todos.push_back(t.is_string() ? t.get<std::string>() : t.dump());
            std::lock_guard lock(s->ledger_mu);
            s->todos = std::move(todos);
            return "todo list updated (" + std::to_string(s->todos.size()) + " items)";
        },
        {},
        {}});

    tools.register_builtin(ToolSpec{
        "workspace_switch",
        "Switch the session's working directory.",
        {{ArgField{"path", ArgType::string, true, "existing directory"}}},
        [this](const extend::ToolCallContext& ctx, const nlohmann::json& args) -> std::string {
            switch_workspace(ctx.session_id, args.at("path").get<std::string>());
            return "workspace is now " + workspace(ctx.session_id).string();
        },
        {},
        {}});

    tools.register_builtin(ToolSpec{
        "workspace_info",
        "Report the current working directory.",
        {},
        [this](const extend::ToolCallContext& ctx, const nlohmann::json&) -> std::string {
            return nlohmann::json{{"agent", ctx.agent_folder}, {"workspace", workspace(ctx.session_id).string()}}
                .dump();
        },
        {},
        {}});

    tools.register_builtin(ToolSpec{
        "skill_load",
        "Load one section of an active skill.",
        {{ArgField{"skill", ArgType::string, true, "skill id or name"},
          ArgField{"section", ArgType::string, true, "section name"}}},
        [this](const extend::ToolCallContext&, const nlohmann::json& args) -> std::string {
            if (!deps_.skills) fail(Errc::not_found, "no skills are installed");
            auto want = args.at("skill").get<std::string>();
            auto id = want;
            for (const auto& s : deps_.skills->list_skills()) {
                if (s.name == want) id = s.skill_id;
            }
            return deps_.skills->load_skill_section(id, args.at("section").get<std::string>());
        },
        {},
        {}});
}

}  // namespace semaclaw::kernel
