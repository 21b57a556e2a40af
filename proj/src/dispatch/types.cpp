#include "semaclaw/dispatch/types.hpp"

#include "semaclaw/common/error.hpp"

namespace semaclaw::dispatch {

namespace {

nlohmann::json opt_time(const std::optional<TimePoint>& t) {
    return t ? nlohmann::json(to_epoch_ms(*t)) : nlohmann::json(nullptr);
}

std::optional<TimePoint> read_time(const nlohmann::json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return from_epoch_ms(it->get<std::int64_t>());
}

nlohmann::json opt_text(const std::optional<std::string>& s) {
    return s ? nlohmann::json(*s) : nlohmann::json(nullptr);
}

std::optional<std::string> read_text(const nlohmann::json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->get<std::string>();
}

}  // namespace

std::string_view to_string(TaskStatus s) noexcept {
    switch (s) {
        case TaskStatus::registered: return "registered";
        case TaskStatus::processing: return "processing";
        case TaskStatus::done: return "done";
        case TaskStatus::error: return "error";
        case TaskStatus::timeout: return "timeout";
    }
    return "error";
}

std::string_view to_string(GroupStatus s) noexcept {
    switch (s) {
        case GroupStatus::queued: return "queued";
        case GroupStatus::active: return "active";
        case GroupStatus::done: return "done";
    }
    return "done";
}

TaskStatus task_status_from_string(std::string_view s) {
    for (auto v : {TaskStatus::registered, TaskStatus::processing, TaskStatus::done, TaskStatus::error,
                   TaskStatus::timeout}) {
        if (to_string(v) == s) return v;
    }
    fail(Errc::validation, "unknown task status '" + std::string(s) + "'");
}

GroupStatus group_status_from_string(std::string_view s) {
    for (auto v : {GroupStatus::queued, GroupStatus::active, GroupStatus::done}) {
        if (to_string(v) == s) return v;
    }
    fail(Errc::validation, "unknown group status '" + std::string(s) + "'");
}

const TaskNode* ParentGroup::find(const std::string& label) const {
    for (const auto& t : tasks) {
        if (t.label == label) return &t;
    }
    return nullptr;
}

TaskNode* ParentGroup::find(const std::string& label) {
    return const_cast<TaskNode*>(static_cast<const ParentGroup*>(this)->find(label));
}

std::string task_ref(const std::string& group_id, const std::string& label) { return group_id + "/" + label; }

std::pair<std::string, std::string> split_task_ref(const std::string& ref) {
    auto slash = ref.find('/');
    if (slash == std::string::npos || slash == 0 || slash + 1 == ref.size()) {
        fail(Errc::argument, "task id must look like <group>/<label>, got '" + ref + "'");
    }
    return {ref.substr(0, slash), ref.substr(slash + 1)};
}

const ParentGroup* DispatchState::group(const std::string& group_id) const {
    for (const auto& g : groups) {
        if (g.group_id == group_id) return &g;
    }
    return nullptr;
}

ParentGroup* DispatchState::group(const std::string& group_id) {
    return const_cast<ParentGroup*>(static_cast<const DispatchState*>(this)->group(group_id));
}

const TaskNode* DispatchState::task(const std::string& ref) const {
    auto slash = ref.find('/');
    if (slash == std::string::npos) return nullptr;
    auto* g = group(ref.substr(0, slash));
    return g ? g->find(ref.substr(slash + 1)) : nullptr;
}

TaskNode* DispatchState::task(const std::string& ref) {
    return const_cast<TaskNode*>(static_cast<const DispatchState*>(this)->task(ref));
}

nlohmann::json to_json(const TaskNode& t) {
    return {{"label", t.label},
            {"agent_name", t.agent_name},
            {"worker", t.worker},
            {"prompt", t.prompt},
            {"depends_on", t.depends_on},
            {"status", to_string(t.status)},
            {"timeout_at", opt_time(t.timeout_at)},
            {"declared_timeout_ms", t.declared_timeout.count()},
            {"result", opt_text(t.result)},
            {"error", opt_text(t.error)},
            {"started_at", opt_time(t.started_at)},
            {"finished_at", opt_time(t.finished_at)}};
}

nlohmann::json to_json(const ParentGroup& g) {
    nlohmann::json tasks = nlohmann::json::array();
    for (const auto& t : g.tasks) tasks.push_back(to_json(t));
    return {{"group_id", g.group_id},
            {"admin_folder", g.admin_folder},
            {"goal", g.goal},
            {"status", to_string(g.status)},
            {"shared_workspace", opt_text(g.shared_workspace)},
            {"tasks", tasks},
            {"created_at", to_epoch_ms(g.created_at)},
            {"activated_at", opt_time(g.activated_at)},
            {"finished_at", opt_time(g.finished_at)}};
}

nlohmann::json to_json(const DispatchState& s) {
    nlohmann::json groups = nlohmann::json::array();
    for (const auto& g : s.groups) groups.push_back(to_json(g));
    return {{"schema_version", s.schema_version},
            {"revision", s.revision},
            {"next_group", s.next_group},
            {"groups", groups},
            {"worker_assignments", s.worker_assignments},
            {"saved_workspaces", s.saved_workspaces}};
}

TaskNode task_from_json(const nlohmann::json& j) {
    TaskNode t;
    t.label = j.at("label");
    t.agent_name = j.value("agent_name", "");
    t.worker = j.value("worker", "");
    t.prompt = j.value("prompt", "");
    t.depends_on = j.value("depends_on", std::vector<std::string>{});
    t.status = task_status_from_string(j.value("status", "registered"));
    t.timeout_at = read_time(j, "timeout_at");
    t.declared_timeout = Duration{j.value("declared_timeout_ms", kDefaultTaskTimeout.count())};
    t.result = read_text(j, "result");
    t.error = read_text(j, "error");
    t.started_at = read_time(j, "started_at");
    t.finished_at = read_time(j, "finished_at");
    return t;
}

ParentGroup group_from_json(const nlohmann::json& j) {
    ParentGroup g;
    g.group_id = j.at("group_id");
    g.admin_folder = j.value("admin_folder", "");
    g.goal = j.value("goal", "");
    g.status = group_status_from_string(j.value("status", "queued"));
    g.shared_workspace = read_text(j, "shared_workspace");
    for (const auto& t : j.value("tasks", nlohmann::json::array())) g.tasks.push_back(task_from_json(t));
    g.created_at = from_epoch_ms(j.value("created_at", std::int64_t{0}));
    g.activated_at = read_time(j, "activated_at");
    g.finished_at = read_time(j, "finished_at");
    return g;
}

DispatchState state_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("schema_version")) {
        fail(Errc::validation, "dispatch state has no schema_version");
    }
    DispatchState s;
    s.schema_version = j.at("schema_version");
    if (s.schema_version != kStateSchemaVersion) {
        fail(Errc::validation, "unsupported dispatch state schema_version " + std::to_string(s.schema_version));
    }
    s.revision = j.value("revision", std::uint64_t{0});
    s.next_group = j.value("next_group", std::uint64_t{1});
    for (const auto& g : j.value("groups", nlohmann::json::array())) s.groups.push_back(group_from_json(g));
    s.worker_assignments = j.value("worker_assignments", std::map<std::string, std::string>{});
    s.saved_workspaces = j.value("saved_workspaces", std::map<std::string, std::string>{});
    return s;
}

}  // namespace semaclaw::dispatch
