#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "semaclaw/common/clock.hpp"

namespace semaclaw::dispatch {

inline constexpr int kStateSchemaVersion = 1;
inline constexpr Duration kDefaultTaskTimeout = std::chrono::minutes{10};

enum class TaskStatus { registered, processing, done, error, timeout };
enum class GroupStatus { queued, active, done };

std::string_view to_string(TaskStatus s) noexcept;
std::string_view to_string(GroupStatus s) noexcept;
TaskStatus task_status_from_string(std::string_view s);
GroupStatus group_status_from_string(std::string_view s);

/// done, error and timeout all count as terminal and unblock dependents.
constexpr bool is_terminal(TaskStatus s) noexcept {
    return s == TaskStatus::done || s == TaskStatus::error || s == TaskStatus::timeout;
}

struct TaskNode {
    std::string label;
    std::string agent_name;  // as declared
    std::string worker;      // resolved agent folder
    std::string prompt;
    std::vector<std::string> depends_on;
    TaskStatus status = TaskStatus::registered;
    std::optional<TimePoint> timeout_at;
    Duration declared_timeout = kDefaultTaskTimeout;
    std::optional<std::string> result;  // present iff done
    std::optional<std::string> error;   // error text for error/timeout
    std::optional<TimePoint> started_at;
    std::optional<TimePoint> finished_at;

    bool operator==(const TaskNode&) const = default;
};

struct ParentGroup {
    std::string group_id;
    std::string admin_folder;
    std::string goal;
    GroupStatus status = GroupStatus::queued;
    std::optional<std::string> shared_workspace;
    std::vector<TaskNode> tasks;
    TimePoint created_at{};
    std::optional<TimePoint> activated_at;
    std::optional<TimePoint> finished_at;

    const TaskNode* find(const std::string& label) const;
    TaskNode* find(const std::string& label);
    bool operator==(const ParentGroup&) const = default;
};

/// "<group_id>/<label>"
std::string task_ref(const std::string& group_id, const std::string& label);
/// Throws Errc::argument on a malformed ref.
std::pair<std::string, std::string> split_task_ref(const std::string& ref);

struct DispatchState {
    int schema_version = kStateSchemaVersion;
    std::uint64_t revision = 0;
    std::uint64_t next_group = 1;
    std::vector<ParentGroup> groups;                       // creation order
    std::map<std::string, std::string> worker_assignments;  // worker folder -> task ref
    std::map<std::string, std::string> saved_workspaces;    // worker folder -> original cwd

    ParentGroup* group(const std::string& group_id);
    const ParentGroup* group(const std::string& group_id) const;
    const TaskNode* task(const std::string& ref) const;
    TaskNode* task(const std::string& ref);
    bool operator==(const DispatchState&) const = default;
};

nlohmann::json to_json(const TaskNode& t);
nlohmann::json to_json(const ParentGroup& g);
nlohmann::json to_json(const DispatchState& s);
TaskNode task_from_json(const nlohmann::json& j);
ParentGroup group_from_json(const nlohmann::json& j);
/// Throws Errc::validation on a missing or unsupported schema_version.
DispatchState state_from_json(const nlohmann::json& j);

}  // namespace semaclaw::dispatch
