#include "semaclaw/dispatch/bridge.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <string_view>
#include <unordered_map>

#include "semaclaw/common/error.hpp"
#include "semaclaw/dispatch/graph.hpp"
#include "semaclaw/dispatch/roster.hpp"

namespace semaclaw::dispatch {

namespace fs = std::filesystem;

TaskSpec task_spec_from_json(const nlohmann::json& j) {
    if (!j.is_object()) fail(Errc::validation, "each task must be an object");
    TaskSpec t;
    t.label = j.value("label", "");
    t.agent_name = j.value("agent", j.value("agent_name", ""));
    t.prompt = j.value("prompt", "");
    t.depends_on = j.value("depends_on", std::vector<std::string>{});
    if (j.contains("timeout_ms") && !j["timeout_ms"].is_null()) {
        auto ms = j["timeout_ms"].get<std::int64_t>();
        if (ms <= 0) fail(Errc::validation, "timeout_ms must be positive");
        t.timeout = Duration{ms};
    }
    return t;
}

nlohmann::json to_json(const CreateResult& r) {
    return {{"group_id", r.group_id},
            {"status", to_string(r.status)},
            {"shared_workspace", r.shared_workspace ? nlohmann::json(*r.shared_workspace) : nlohmann::json(nullptr)}};
}

std::string_view to_string(ActionKind k) noexcept {
    switch (k) {
        case ActionKind::timed_out: return "timed_out";
        case ActionKind::dispatched: return "dispatched";
        case ActionKind::finished: return "finished";
        case ActionKind::group_done: return "group_done";
        case ActionKind::group_promoted: return "group_promoted";
        case ActionKind::workspace_restored: return "workspace_restored";
    }
    return "finished";
}

nlohmann::json to_json(const DispatchAction& a) {
    return {{"kind", to_string(a.kind)},
            {"group_id", a.group_id},
            {"label", a.label},
            {"worker", a.worker},
            {"detail", a.detail}};
}

CreateResult create_parent(StateStore& store, const std::vector<context::AgentIdentity>& agents,
                           const std::string& admin_folder, const std::string& goal,
                           const std::vector<TaskSpec>& tasks, Duration default_timeout, const fs::path& admin_cwd,
                           TimePoint now) {
    if (tasks.empty()) fail(Errc::validation, "a parent group needs at least one task");
    if (default_timeout <= Duration::zero()) fail(Errc::validation, "default timeout must be positive");
    std::vector<TaskNode> nodes;
    for (const auto& spec : tasks) {
        TaskNode n;
        n.label = spec.label;
        n.agent_name = spec.agent_name;
        n.prompt = spec.prompt;
        n.depends_on = spec.depends_on;
        n.declared_timeout = spec.timeout.value_or(default_timeout);
        nodes.push_back(std::move(n));
    }
    validate_graph(nodes);
    for (auto& n : nodes) n.worker = resolve_agent(agents, n.agent_name).folder;

    CreateResult result;
    store.transact([&](DispatchState& s) {
        ParentGroup g;
        g.group_id = "g-" + std::to_string(s.next_group++);
        g.admin_folder = admin_folder;
        g.goal = goal;
        g.tasks = nodes;
        g.created_at = now;
        bool busy = std::any_of(s.groups.begin(), s.groups.end(), [&](const ParentGroup& o) {
            return o.admin_folder == admin_folder && (o.status == GroupStatus::active || o.status == GroupStatus::queued);
        });
        if (!busy) {
            g.status = GroupStatus::active;
            g.activated_at = now;
            if (!admin_cwd.empty()) g.shared_workspace = admin_cwd.string();
        }
        result = CreateResult{g.group_id, g.status, g.shared_workspace};
        s.groups.push_back(std::move(g));
        return true;
    });
    return result;
}

std::string augment_prompt(const ParentGroup& group, const TaskNode& task) {
    std::string out = "<parent_goal>\n" + group.goal + "\n</parent_goal>\n<prerequisites>\n";
    for (const auto& dep : task.depends_on) {
        const auto* d = group.find(dep);
        if (!d) continue;
        out += "- " + d->label + ": " + std::string(to_string(d->status));
        if (d->status == TaskStatus::done && d->result) out += "\n  result: " + *d->result;
        out += "\n";
    }
    out += "</prerequisites>\n<other_tasks>\n";
    for (const auto& other : group.tasks) {
        if (other.label == task.label) continue;
        out += "- " + other.label + ": " + std::string(to_string(other.status)) + "\n";
    }
    out += "</other_tasks>\n\n" + task.prompt;
    return out;
}

struct DispatchBridge::Effects {
    struct Submission {
        std::string worker;
        std::string ref;
        std::string prompt;
    };
    std::vector<DispatchAction> actions;
    std::vector<std::pair<std::string, fs::path>> workspaces;
    std::vector<Submission> submissions;
    std::vector<std::string> freed;
};

DispatchBridge::DispatchBridge(StateStore& store, const context::AgentRegistry& agents, WorkerPort& port,
                               Clock& clock)
    : store_(store), agents_(agents), port_(port), clock_(clock) {}

DispatchBridge::~DispatchBridge() { stop(); }

CreateResult DispatchBridge::create_parent(const std::string& admin_folder, const std::string& goal,
                                           const std::vector<TaskSpec>& tasks, Duration default_timeout,
                                           std::optional<fs::path> admin_cwd) {
    auto cwd = admin_cwd ? *admin_cwd : port_.workspace(admin_folder);
    return dispatch::create_parent(store_, agents_.all(), admin_folder, goal, tasks, default_timeout, cwd,
                                   clock_.now());
}

void DispatchBridge::advance(DispatchState& s, TimePoint now, Effects& fx) {
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t gi = 0; gi < s.groups.size(); ++gi) {
            auto& g = s.groups[gi];
            if (g.status != GroupStatus::active) continue;

            std::unordered_map<std::string_view, const TaskNode*> by_label;
            by_label.reserve(g.tasks.size());
            for (const auto& t : g.tasks) by_label.emplace(t.label, &t);
            std::vector<std::size_t> ready;
            for (std::size_t i = 0; i < g.tasks.size(); ++i) {
                const auto& t = g.tasks[i];
                if (t.status != TaskStatus::registered) continue;
                bool deps_done = std::all_of(t.depends_on.begin(), t.depends_on.end(), [&](const std::string& d) {
                    auto it = by_label.find(d);
                    return it != by_label.end() && is_terminal(it->second->status);
                });
                if (deps_done) ready.push_back(i);
            }
            std::sort(ready.begin(), ready.end(),
                      [&](std::size_t a, std::size_t b) { return g.tasks[a].label < g.tasks[b].label; });

            for (auto i : ready) {
                auto& t = g.tasks[i];
                if (s.worker_assignments.count(t.worker)) continue;
                auto prompt = augment_prompt(g, t);
                if (g.shared_workspace) {
                    if (!s.saved_workspaces.count(t.worker)) {
                        s.saved_workspaces[t.worker] = port_.workspace(t.worker).string();
                    }
                    fx.workspaces.emplace_back(t.worker, *g.shared_workspace);
                }
                t.status = TaskStatus::processing;
                t.started_at = now;
                t.timeout_at = now + t.declared_timeout;
                auto ref = task_ref(g.group_id, t.label);
                s.worker_assignments[t.worker] = ref;
                fx.submissions.push_back({t.worker, ref, prompt});
                fx.actions.push_back({ActionKind::dispatched, g.group_id, t.label, t.worker, prompt});
                changed = true;
            }

            bool all_terminal =
                std::all_of(g.tasks.begin(), g.tasks.end(), [](const TaskNode& t) { return is_terminal(t.status); });
            if (!all_terminal) continue;
            g.status = GroupStatus::done;
            g.finished_at = now;
            fx.actions.push_back({ActionKind::group_done, g.group_id, {}, {}, {}});
            changed = true;
            auto admin = g.admin_folder;
            for (auto& q : s.groups) {
                if (q.admin_folder != admin || q.status != GroupStatus::queued) continue;
                q.status = GroupStatus::active;
                q.activated_at = now;
                auto ws = port_.workspace(admin);
                if (!ws.empty()) q.shared_workspace = ws.string();
                fx.actions.push_back({ActionKind::group_promoted, q.group_id, {}, {}, q.shared_workspace.value_or("")});
                break;
            }
        }
    }
}

void DispatchBridge::restore_freed(DispatchState& s, Effects& fx) {
    for (const auto& w : fx.freed) {
        if (s.worker_assignments.count(w)) continue;
        auto it = s.saved_workspaces.find(w);
        if (it == s.saved_workspaces.end()) continue;
        fx.workspaces.emplace_back(w, it->second);
        fx.actions.push_back({ActionKind::workspace_restored, {}, {}, w, it->second});
        s.saved_workspaces.erase(it);
    }
}

std::vector<DispatchAction> DispatchBridge::apply(Effects& fx) {
    for (const auto& [worker, path] : fx.workspaces) port_.set_workspace(worker, path);
    auto actions = std::move(fx.actions);
    for (const auto& sub : fx.submissions) {
        try {
            port_.submit(sub.worker, sub.ref, sub.prompt);
        } catch (const std::exception& e) {
            auto more = notify_error(sub.worker, std::string("worker unavailable: ") + e.what(), sub.ref);
            actions.insert(actions.end(), more.begin(), more.end());
        }
    }
    return actions;
}

std::vector<DispatchAction> DispatchBridge::tick() {
    Effects fx;
    auto now = clock_.now();
    store_.transact([&](DispatchState& s) {
        for (auto& g : s.groups) {
            if (g.status != GroupStatus::active) continue;
            for (auto& t : g.tasks) {
                if (t.status != TaskStatus::processing || !t.timeout_at || *t.timeout_at > now) continue;
                t.status = TaskStatus::timeout;
                t.error = "timed out";
                t.finished_at = now;
                auto ref = task_ref(g.group_id, t.label);
                auto it = s.worker_assignments.find(t.worker);
                if (it != s.worker_assignments.end() && it->second == ref) s.worker_assignments.erase(it);
                fx.freed.push_back(t.worker);
                fx.actions.push_back({ActionKind::timed_out, g.group_id, t.label, t.worker, {}});
            }
        }
        advance(s, now, fx);
        restore_freed(s, fx);
        return !fx.actions.empty();
    });
    return apply(fx);
}

std::vector<DispatchAction> DispatchBridge::finish(const std::string& worker, const std::optional<std::string>& ref,
                                                   TaskStatus status, const std::string& text) {
    Effects fx;
    auto now = clock_.now();
    bool stale = false;
    store_.transact([&](DispatchState& s) {
        auto it = s.worker_assignments.find(worker);
        if (it == s.worker_assignments.end() || (ref && *ref != it->second)) {
            stale = true;
            return false;
        }
        auto current = it->second;
        auto* t = s.task(current);
        s.worker_assignments.erase(it);
        if (!t || t->status != TaskStatus::processing) {
            stale = true;
            return true;
        }
        t->status = status;
        t->finished_at = now;
        if (status == TaskStatus::done) {
            t->result = text;
        } else {
            t->error = text;
        }
        auto [gid, label] = split_task_ref(current);
        fx.actions.push_back({ActionKind::finished, gid, label, worker, std::string(to_string(status))});
        fx.freed.push_back(worker);
        advance(s, now, fx);
        restore_freed(s, fx);
        return true;
    });
    if (stale) ++stale_;
    return apply(fx);
}

std::vector<DispatchAction> DispatchBridge::notify_reply(const std::string& worker, const std::string& reply,
                                                         const std::optional<std::string>& ref) {
    return finish(worker, ref, TaskStatus::done, reply);
}

std::vector<DispatchAction> DispatchBridge::notify_error(const std::string& worker, const std::string& error,
                                                         const std::optional<std::string>& ref) {
    return finish(worker, ref, TaskStatus::error, error);
}

RecoveryReport DispatchBridge::recover_on_startup() {
    RecoveryReport report;
    auto now = clock_.now();
    store_.transact([&](DispatchState& s) {
        for (auto& g : s.groups) {
            if (g.status == GroupStatus::done) continue;
            for (auto& t : g.tasks) {
                if (is_terminal(t.status)) continue;
                t.status = TaskStatus::error;
                t.error = "interrupted";
                t.finished_at = now;
                report.tasks.push_back(task_ref(g.group_id, t.label));
            }
            g.status = GroupStatus::done;
            g.finished_at = now;
            report.groups.push_back(g.group_id);
        }
        bool dirty = !report.empty() || !s.worker_assignments.empty() || !s.saved_workspaces.empty();
        s.worker_assignments.clear();
        s.saved_workspaces.clear();
        return dirty;
    });
    return report;
}

namespace {

/// Longest chain of declared timeouts strictly upstream of `label`.
Duration upstream_budget(const ParentGroup& g, const std::string& label) {
    std::map<std::string, Duration> memo;
    std::function<Duration(const std::string&)> through = [&](const std::string& l) -> Duration {
        if (auto it = memo.find(l); it != memo.end()) return it->second;
        memo[l] = Duration::zero();
        const auto* t = g.find(l);
        if (!t) return Duration::zero();
        Duration best = Duration::zero();
        for (const auto& d : t->depends_on) best = std::max(best, through(d));
        return memo[l] = best + t->declared_timeout;
    };
    const auto* t = g.find(label);
    Duration best = Duration::zero();
    if (t) {
        for (const auto& d : t->depends_on) best = std::max(best, through(d));
    }
    return best;
}

}  // namespace

TaskNode DispatchBridge::dispatch_wait(const std::string& ref, Duration poll) {
    auto [gid, label] = split_task_ref(ref);
    const auto wait_start = clock_.now();
    auto next_heartbeat = wait_start + kHeartbeatInterval;
    for (;;) {
        auto s = store_.read();
        const auto* g = s.group(gid);
        const auto* t = g ? g->find(label) : nullptr;
        if (!t) fail(Errc::not_found, "no task " + ref);
        if (is_terminal(t->status)) return *t;

        auto now = clock_.now();
        std::optional<TimePoint> deadline;
        if (t->status == TaskStatus::processing && t->timeout_at) {
            deadline = *t->timeout_at + kWaitGrace;
        } else if (g->status == GroupStatus::active) {
            auto base = std::max(wait_start, g->activated_at.value_or(wait_start));
            deadline = base + t->declared_timeout + upstream_budget(*g, label);
        }
        if (deadline && now > *deadline) {
            fail(Errc::wait_timeout, "task " + ref + " is still " + std::string(to_string(t->status)) +
                                         " past its wait deadline");
        }
        if (now >= next_heartbeat) {
            heartbeat(g->admin_folder);
            while (next_heartbeat <= now) next_heartbeat += kHeartbeatInterval;
        }
        clock_.sleep_for(poll);
    }
}

void DispatchBridge::heartbeat(const std::string& admin_folder) {
    ++heartbeats_;
    port_.heartbeat(admin_folder);
}

void DispatchBridge::start(Duration interval) {
    std::lock_guard lock(loop_mu_);
    if (loop_.joinable()) return;
    stopping_ = false;
    loop_ = std::thread([this, interval] {
        std::unique_lock lock(loop_mu_);
        while (!stopping_) {
            lock.unlock();
            try {
                tick();
            } catch (const std::exception&) {
            }
            lock.lock();
            loop_cv_.wait_for(lock, interval, [this] { return stopping_; });
        }
    });
}

void DispatchBridge::stop() {
    {
        std::lock_guard lock(loop_mu_);
        stopping_ = true;
    }
    loop_cv_.notify_all();
    if (loop_.joinable()) loop_.join();
}

}  // namespace semaclaw::dispatch
