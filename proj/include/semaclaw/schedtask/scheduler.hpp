#pragma once

#include <atomic>
#include <condition_variable>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "semaclaw/common/clock.hpp"
#include "semaclaw/extend/tools.hpp"
#include "semaclaw/schedtask/job.hpp"

namespace semaclaw::schedtask {

inline constexpr std::size_t kMaxScriptOutput = 64 * 1024;
inline constexpr Duration kScriptTimeout = std::chrono::minutes{5};

/// Destination for notify jobs and outbound messages.
class ChannelSink {
public:
    virtual ~ChannelSink() = default;
    virtual void deliver(const std::string& channel, const std::string& message, const std::string& origin) = 0;
};

/// Runs one agent turn for scheduled work. Throws on failure.
class AgentPort {
public:
    virtual ~AgentPort() = default;
    virtual std::string run_turn(const std::string& agent_folder, const std::string& prompt) = 0;
};

enum class OutcomeStatus { delivered, succeeded, failed, failed_pre, agent_replied, agent_failed };

std::string_view to_string(OutcomeStatus s) noexcept;

struct JobOutcome {
    std::string job_id;
    JobMode mode = JobMode::notify;
    OutcomeStatus status = OutcomeStatus::delivered;
    TimePoint due{};
    int exit_code = 0;
    std::string output;  // script stdout, truncated to 64 KiB
    std::string prompt;  // what the agent was given
    std::string reply;
    std::string error;
    bool model_invoked = false;
};

nlohmann::json to_json(const JobOutcome& o);

class Scheduler {
public:
    Scheduler(JobStore& store, ChannelSink& sink, AgentPort& agents, Clock& clock);
    ~Scheduler();
    Scheduler(const Scheduler&) = delete;
    Scheduler& operator=(const Scheduler&) = delete;

    /// Claims every enabled job due at `now` (advancing its next due time, or
    /// disabling a one-shot job) before running it, so overlapping calls never
    /// fire the same due instant twice. Outcomes are in job id order.
    std::vector<JobOutcome> run_due(TimePoint now);

    /// Fires a job immediately without touching its schedule. Errors: not_found.
    JobOutcome run_now(const std::string& job_id);

    /// Background timer calling run_due(clock.now()).
    void start(Duration interval = std::chrono::seconds{1});
    void stop();

private:
    JobOutcome execute(const ScheduledJob& job, TimePoint due);

    JobStore& store_;
    ChannelSink& sink_;
    AgentPort& agents_;
    Clock& clock_;
    std::mutex loop_mu_;
    std::condition_variable loop_cv_;
    bool stopping_ = false;
    std::thread loop_;
};

/// task_add {job}, task_list {}, task_cancel {job_id}.
void register_schedule_tools(extend::ToolRegistry& tools, JobStore& store, Clock& clock);
/// send_message {message, channel}.
void register_send_message_tool(extend::ToolRegistry& tools, ChannelSink& sink);

}  // namespace semaclaw::schedtask
