#include "semaclaw/schedtask/job.hpp"

#include "semaclaw/common/error.hpp"
#include "semaclaw/common/fs.hpp"
#include "semaclaw/schedtask/cron.hpp"

namespace semaclaw::schedtask {

std::string_view to_string(JobMode m) noexcept {
    switch (m) {
        case JobMode::notify: return "notify";
        case JobMode::script: return "script";
        case JobMode::agent: return "agent";
        case JobMode::hybrid: return "hybrid";
    }
    return "notify";
}

JobMode job_mode_from_string(std::string_view s) {
    for (auto m : {JobMode::notify, JobMode::script, JobMode::agent, JobMode::hybrid}) {
        if (to_string(m) == s) return m;
    }
    fail(Errc::validation, "unknown job mode '" + std::string(s) + "'");
}

void ScheduledJob::validate() const {
    if (at.has_value() == cron.has_value()) {
        fail(Errc::validation, "a job needs exactly one of a one-shot time or a cron spec");
    }
    if (cron) CronSpec::parse(*cron);
    switch (mode) {
        case JobMode::notify:
            if (message.empty()) fail(Errc::validation, "notify job needs a message");
            if (channel.empty()) fail(Errc::validation, "notify job needs a channel");
            break;
        case JobMode::script:
            if (script.command.empty()) fail(Errc::validation, "script job needs a command");
            break;
        case JobMode::agent:
            if (agent.empty() || prompt.empty()) fail(Errc::validation, "agent job needs an agent and a prompt");
            break;
        case JobMode::hybrid: {
            if (script.command.empty()) fail(Errc::validation, "hybrid job needs a command");
            if (agent.empty()) fail(Errc::validation, "hybrid job needs an agent");
            auto first = prompt.find(kScriptOutputPlaceholder);
            if (first == std::string::npos ||
                prompt.find(kScriptOutputPlaceholder, first + 1) != std::string::npos) {
                fail(Errc::validation, "hybrid prompt must contain {script_output} exactly once");
            }
            break;
        }
    }
}

ScheduledJob job_from_json(const nlohmann::json& j) {
    if (!j.is_object()) fail(Errc::validation, "job must be a JSON object");
    ScheduledJob job;
    try {
        job.job_id = j.value("job_id", "");
        job.mode = job_mode_from_string(j.value("mode", ""));
        if (j.contains("at") && !j["at"].is_null()) {
            job.at = j["at"].is_number() ? from_epoch_ms(j["at"].get<std::int64_t>())
                                         : parse_iso8601(j["at"].get<std::string>());
        }
        if (j.contains("cron") && !j["cron"].is_null()) job.cron = j["cron"].get<std::string>();
        job.message = j.value("message", "");
        job.channel = j.value("channel", "stdout");
        job.script.command = j.value("command", "");
        if (j.contains("workdir") && !j["workdir"].is_null()) job.script.workdir = j["workdir"].get<std::string>();
        job.script.env = j.value("env", std::map<std::string, std::string>{});
        job.agent = j.value("agent", "");
        job.prompt = j.value("prompt", "");
        job.enabled = j.value("enabled", true);
        if (j.contains("next_due") && !j["next_due"].is_null()) {
            job.next_due = from_epoch_ms(j["next_due"].get<std::int64_t>());
        }
        if (j.contains("last_fired") && !j["last_fired"].is_null()) {
            job.last_fired = from_epoch_ms(j["last_fired"].get<std::int64_t>());
        }
    } catch (const nlohmann::json::exception& e) {
        fail(Errc::validation, std::string("malformed job: ") + e.what());
    } catch (const Error& e) {
        fail(Errc::validation, e.what());
    }
    return job;
}

nlohmann::json to_json(const ScheduledJob& job) {
    auto t = [](const std::optional<TimePoint>& p) {
        return p ? nlohmann::json(to_epoch_ms(*p)) : nlohmann::json(nullptr);
    };
    nlohmann::json j{{"job_id", job.job_id},
                     {"mode", to_string(job.mode)},
                     {"at", t(job.at)},
                     {"cron", job.cron ? nlohmann::json(*job.cron) : nlohmann::json(nullptr)},
                     {"enabled", job.enabled},
                     {"next_due", t(job.next_due)},
                     {"last_fired", t(job.last_fired)}};
    switch (job.mode) {
        case JobMode::notify:
            j["message"] = job.message;
            j["channel"] = job.channel;
            break;
        case JobMode::hybrid:
        case JobMode::script:
            j["command"] = job.script.command;
            j["workdir"] = job.script.workdir ? nlohmann::json(*job.script.workdir) : nlohmann::json(nullptr);
            j["env"] = job.script.env;
            if (job.mode == JobMode::script) break;
            [[fallthrough]];
        case JobMode::agent:
            j["agent"] = job.agent;
            j["prompt"] = job.prompt;
            break;
    }
    return j;
}

JobStore::JobStore(std::filesystem::path file) : file_(std::move(file)) {
    std::error_code ec;
    if (file_.has_parent_path()) std::filesystem::create_directories(file_.parent_path(), ec);
}

JobStore::Doc JobStore::load() const {
    Doc doc;
    auto text = fsutil::try_read_file(file_);
    if (!text) return doc;
    try {
        auto j = nlohmann::json::parse(*text);
        doc.next_id = j.value("next_id", std::uint64_t{1});
        for (const auto& job : j.value("jobs", nlohmann::json::array())) doc.jobs.push_back(job_from_json(job));
    } catch (const nlohmann::json::exception& e) {
        fail(Errc::validation, "job store " + file_.string() + " is corrupt: " + e.what());
    }
    return doc;
}

void JobStore::save(const Doc& doc) const {
    nlohmann::json jobs = nlohmann::json::array();
    for (const auto& job : doc.jobs) jobs.push_back(to_json(job));
    fsutil::atomic_write(file_, nlohmann::json{{"schema_version", 1}, {"next_id", doc.next_id}, {"jobs", jobs}}.dump(2));
}

namespace {

std::filesystem::path lock_for(const std::filesystem::path& p) {
    auto l = p;
    l += ".lock";
    return l;
}

}  // namespace

std::string JobStore::register_job(ScheduledJob job, TimePoint now) {
    job.validate();
    job.next_due = job.at ? *job.at : CronSpec::parse(*job.cron).next_after(now);
    job.last_fired.reset();
    std::lock_guard lock(mu_);
    ExclusiveLockFile file_lock(lock_for(file_));
    file_lock.lock();
    auto doc = load();
    job.job_id = "job-" + std::to_string(doc.next_id++);
    doc.jobs.push_back(job);
    save(doc);
    return job.job_id;
}

void JobStore::cancel_job(const std::string& job_id) {
    std::lock_guard lock(mu_);
    ExclusiveLockFile file_lock(lock_for(file_));
    file_lock.lock();
    auto doc = load();
    auto n = std::erase_if(doc.jobs, [&](const ScheduledJob& j) { return j.job_id == job_id; });
    if (n == 0) fail(Errc::not_found, "no job " + job_id);
    save(doc);
}

std::vector<ScheduledJob> JobStore::list_jobs() const {
    std::lock_guard lock(mu_);
    ExclusiveLockFile file_lock(lock_for(file_));
    file_lock.lock();
    return load().jobs;
}

std::optional<ScheduledJob> JobStore::find(const std::string& job_id) const {
    for (auto& j : list_jobs()) {
        if (j.job_id == job_id) return j;
    }
    return std::nullopt;
}

void JobStore::update(const std::function<void(std::vector<ScheduledJob>&)>& fn) {
    std::lock_guard lock(mu_);
    ExclusiveLockFile file_lock(lock_for(file_));
    file_lock.lock();
    auto doc = load();
    fn(doc.jobs);
    save(doc);
}

}  // namespace semaclaw::schedtask
