#pragma once

#include <atomic>
#include <condition_variable>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "semaclaw/common/clock.hpp"
#include "semaclaw/context/registry.hpp"
#include "semaclaw/dispatch/state_store.hpp"
#include "semaclaw/dispatch/types.hpp"

namespace semaclaw::dispatch {

inline constexpr Duration kTickInterval{300};
inline constexpr Duration kPollInterval{500};
inline constexpr Duration kHeartbeatInterval = std::chrono::minutes{2};
/// Slack past timeout_at before a waiter gives up on a processing task.
inline constexpr Duration kWaitGrace{1000};

struct TaskSpec {
    std::string label;
    std::string agent_name;
    std::string prompt;
    std::vector<std::string> depends_on;
    std::optional<Duration> timeout;
};

/// {"label", "agent", "prompt", "depends_on": [...], "timeout_ms"}
TaskSpec task_spec_from_json(const nlohmann::json& j);

struct CreateResult {
    std::string group_id;
    GroupStatus status = GroupStatus::queued;
    std::optional<std::string> shared_workspace;
};

nlohmann::json to_json(const CreateResult& r);

/// Validates and persists a new group. It becomes active at once (capturing
/// `admin_cwd` as its shared workspace) unless the admin already has an active
/// group, in which case it is queued. Touches only the state file, so it is
/// safe to call from a separate process.
/// Errors: validation (cycle, duplicate label, empty), not_found / ambiguity
/// (agent names).
CreateResult create_parent(StateStore& store, const std::vector<context::AgentIdentity>& agents,
                           const std::string& admin_folder, const std::string& goal,
                           const std::vector<TaskSpec>& tasks, Duration default_timeout,
                           const std::filesystem::path& admin_cwd, TimePoint now);

/// The prompt a worker receives: the tagged <parent_goal>, <prerequisites>
/// and <other_tasks> sections followed by the task's own prompt.
std::string augment_prompt(const ParentGroup& group, const TaskNode& task);

/// What the dispatcher needs from the process hosting the worker agents.
class WorkerPort {
public:
    virtual ~WorkerPort() = default;
    virtual std::filesystem::path workspace(const std::string& folder) = 0;
    virtual void set_workspace(const std::string& folder, const std::filesystem::path& path) = 0;
    /// Hands the prompt to the worker. The worker answers later through
    /// notify_reply / notify_error with the same task ref. Throws when the
    /// worker cannot accept work.
    virtual void submit(const std::string& folder, const std::string& task_ref, const std::string& prompt) = 0;
    /// Refreshes the admin's session activity.
    virtual void heartbeat(const std::string& admin_folder) = 0;
};

enum class ActionKind { timed_out, dispatched, finished, group_done, group_promoted, workspace_restored };

std::string_view to_string(ActionKind k) noexcept;

struct DispatchAction {
    ActionKind kind;
    std::string group_id;
    std::string label;
    std::string worker;
    std::string detail;  // prompt, workspace path or status

    bool operator==(const DispatchAction&) const = default;
};

nlohmann::json to_json(const DispatchAction& a);

struct RecoveryReport {
    std::vector<std::string> groups;  // closed group ids
    std::vector<std::string> tasks;   // refs marked error("interrupted")
    bool empty() const noexcept { return groups.empty() && tasks.empty(); }
};

/// Drives parent groups to completion: a 300 ms tick that times out expired
/// tasks and dispatches unblocked ones, plus immediate unblocking whenever a
/// worker reports back.
class DispatchBridge {
public:
    DispatchBridge(StateStore& store, const context::AgentRegistry& agents, WorkerPort& port, Clock& clock);
    ~DispatchBridge();
    DispatchBridge(const DispatchBridge&) = delete;
    DispatchBridge& operator=(const DispatchBridge&) = delete;

    /// The admin's current workspace (from the port) is captured when no cwd is given.
    CreateResult create_parent(const std::string& admin_folder, const std::string& goal,
                               const std::vector<TaskSpec>& tasks, Duration default_timeout = kDefaultTaskTimeout,
                               std::optional<std::filesystem::path> admin_cwd = std::nullopt);

    std::vector<DispatchAction> tick();

    /// Stale reports (no matching assignment, e.g. after a timeout) are
    /// dropped and counted.
    std::vector<DispatchAction> notify_reply(const std::string& worker, const std::string& reply,
                                             const std::optional<std::string>& ref = std::nullopt);
    std::vector<DispatchAction> notify_error(const std::string& worker, const std::string& error,
                                             const std::optional<std::string>& ref = std::nullopt);

    RecoveryReport recover_on_startup();

    /// Polls until the task is terminal. Errors: not_found, wait_timeout.
    TaskNode dispatch_wait(const std::string& ref, Duration poll = kPollInterval);

    void heartbeat(const std::string& admin_folder);
    std::uint64_t heartbeats() const noexcept { return heartbeats_; }
    std::uint64_t stale_notifications() const noexcept { return stale_; }

    DispatchState state() const { return store_.read(); }
    StateStore& store() noexcept { return store_; }

    /// Background tick loop on the given interval.
    void start(Duration interval = kTickInterval);
    void stop();

private:
    struct Effects;

    std::vector<DispatchAction> finish(const std::string& worker, const std::optional<std::string>& ref,
                                       TaskStatus status, const std::string& text);
    void advance(DispatchState& state, TimePoint now, Effects& fx);
    void restore_freed(DispatchState& state, Effects& fx);
    std::vector<DispatchAction> apply(Effects& fx);

    StateStore& store_;
    const context::AgentRegistry& agents_;
    WorkerPort& port_;
    Clock& clock_;
    std::atomic<std::uint64_t> heartbeats_{0};
    std::atomic<std::uint64_t> stale_{0};

    std::mutex loop_mu_;
    std::condition_variable loop_cv_;
    bool stopping_ = false;
    std::thread loop_;
};

}  // namespace semaclaw::dispatch
