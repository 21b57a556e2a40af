#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "semaclaw/common/clock.hpp"
#include "semaclaw/common/lock.hpp"

namespace semaclaw::schedtask {

enum class JobMode { notify, script, agent, hybrid };

std::string_view to_string(JobMode m) noexcept;
JobMode job_mode_from_string(std::string_view s);

inline constexpr const char* kScriptOutputPlaceholder = "{script_output}";

struct ScriptPayload {
    std::string command;  // run through /bin/sh -c
    std::optional<std::string> workdir;
    std::map<std::string, std::string> env;
};

struct ScheduledJob {
    std::string job_id;
    JobMode mode = JobMode::notify;
    std::optional<TimePoint> at;     // one-shot
    std::optional<std::string> cron;  // recurring
    // notify
    std::string message;
    std::string channel = "stdout";
    // script / hybrid
    ScriptPayload script;
    // agent / hybrid (for hybrid, a template holding {script_output} once)
    std::string agent;
    std::string prompt;

    bool enabled = true;
    std::optional<TimePoint> next_due;
    std::optional<TimePoint> last_fired;

    /// Throws Errc::validation when the payload does not fit the mode.
    void validate() const;
};

/// {"mode", "at" (ISO-8601) | "cron", "message", "channel", "command",
/// "workdir", "env", "agent", "prompt", "enabled"}
ScheduledJob job_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ScheduledJob& job);

/// Jobs persisted as one JSON file, guarded by "<path>.lock" so the CLI and
/// a running daemon can both edit it. Re-read on every call.
class JobStore {
public:
    explicit JobStore(std::filesystem::path file);

    /// Validates, assigns an id and the first due time. Returns the id.
    std::string register_job(ScheduledJob job, TimePoint now);
    /// Errors: not_found.
    void cancel_job(const std::string& job_id);
    std::vector<ScheduledJob> list_jobs() const;
    std::optional<ScheduledJob> find(const std::string& job_id) const;

    /// Runs `fn` on the job list under the lock and saves the result.
    void update(const std::function<void(std::vector<ScheduledJob>&)>& fn);

    const std::filesystem::path& path() const noexcept { return file_; }

private:
    struct Doc {
        std::uint64_t next_id = 1;
        std::vector<ScheduledJob> jobs;
    };
    Doc load() const;
    void save(const Doc& doc) const;

    std::filesystem::path file_;
    mutable std::mutex mu_;
};

}  // namespace semaclaw::schedtask
