#include "semaclaw/schedtask/scheduler.hpp"

#include <algorithm>
#include <future>

#include "semaclaw/common/error.hpp"
#include "semaclaw/common/process.hpp"
#include "semaclaw/schedtask/cron.hpp"

namespace semaclaw::schedtask {

std::string_view to_string(OutcomeStatus s) noexcept {
    switch (s) {
        case OutcomeStatus::delivered: return "delivered";
        case OutcomeStatus::succeeded: return "succeeded";
        case OutcomeStatus::failed: return "failed";
        case OutcomeStatus::failed_pre: return "failed_pre";
        case OutcomeStatus::agent_replied: return "agent_replied";
        case OutcomeStatus::agent_failed: return "agent_failed";
    }
    return "failed";
}

nlohmann::json to_json(const JobOutcome& o) {
    return {{"job_id", o.job_id},
            {"mode", to_string(o.mode)},
            {"status", to_string(o.status)},
            {"due", to_epoch_ms(o.due)},
            {"exit_code", o.exit_code},
            {"output", o.output},
            {"prompt", o.prompt},
            {"reply", o.reply},
            {"error", o.error},
            {"model_invoked", o.model_invoked}};
}

Scheduler::Scheduler(JobStore& store, ChannelSink& sink, AgentPort& agents, Clock& clock)
    : store_(store), sink_(sink), agents_(agents), clock_(clock) {}

Scheduler::~Scheduler() { stop(); }

JobOutcome Scheduler::execute(const ScheduledJob& job, TimePoint due) {
    JobOutcome out;
    out.job_id = job.job_id;
    out.mode = job.mode;
    out.due = due;

    auto run_script = [&]() -> bool {
        ProcessOptions opts;
        if (job.script.workdir) opts.workdir = *job.script.workdir;
        opts.env = job.script.env;
        opts.timeout = kScriptTimeout;
        opts.max_output = kMaxScriptOutput;
        auto r = run_shell(job.script.command, opts);
        out.exit_code = r.exit_code;
        out.output = r.out.substr(0, kMaxScriptOutput);
        if (r.timed_out) out.error = "script timed out";
        else if (r.exit_code != 0) out.error = r.err;
        return r.exit_code == 0 && !r.timed_out;
    };
    auto run_agent = [&](const std::string& prompt) {
        out.prompt = prompt;
        out.model_invoked = true;
        try {
            out.reply = agents_.run_turn(job.agent, prompt);
            out.status = OutcomeStatus::agent_replied;
        } catch (const std::exception& e) {
            out.status = OutcomeStatus::agent_failed;
            out.error = e.what();
        }
    };

    switch (job.mode) {
        case JobMode::notify:
            sink_.deliver(job.channel, job.message, job.job_id);
            out.status = OutcomeStatus::delivered;
            break;
        case JobMode::script:
            out.status = run_script() ? OutcomeStatus::succeeded : OutcomeStatus::failed;
            break;
        case JobMode::agent:
            run_agent(job.prompt);
            break;
        case JobMode::hybrid: {
            if (!run_script()) {
                out.status = OutcomeStatus::failed_pre;
                break;
            }
            auto prompt = job.prompt;
            auto pos = prompt.find(kScriptOutputPlaceholder);
            prompt.replace(pos, std::string_view(kScriptOutputPlaceholder).size(), out.output);
            run_agent(prompt);
            break;
        }
    }
    return out;
}

std::vector<JobOutcome> Scheduler::run_due(TimePoint now) {
    std::vector<std::pair<ScheduledJob, TimePoint>> claimed;
    store_.update([&](std::vector<ScheduledJob>& jobs) {
        for (auto& job : jobs) {
            if (!job.enabled || !job.next_due || *job.next_due > now) continue;
            claimed.emplace_back(job, *job.next_due);
            job.last_fired = now;
            if (job.cron) {
                job.next_due = CronSpec::parse(*job.cron).next_after(now);
            } else {
                job.enabled = false;
                job.next_due.reset();
            }
        }
    });
    std::sort(claimed.begin(), claimed.end(), [](const auto& a, const auto& b) {
        auto na = std::stoull(a.first.job_id.substr(4)), nb = std::stoull(b.first.job_id.substr(4));
        return na < nb;
    });
    std::vector<std::future<JobOutcome>> running;
    for (const auto& [job, due] : claimed) {
        running.push_back(std::async(std::launch::async, [this, job = job, due = due] { return execute(job, due); }));
    }
    std::vector<JobOutcome> out;
    for (auto& f : running) out.push_back(f.get());
    return out;
}

JobOutcome Scheduler::run_now(const std::string& job_id) {
    auto job = store_.find(job_id);
    if (!job) fail(Errc::not_found, "no job " + job_id);
    return execute(*job, clock_.now());
}

void Scheduler::start(Duration interval) {
    std::lock_guard lock(loop_mu_);
    if (loop_.joinable()) return;
    stopping_ = false;
    loop_ = std::thread([this, interval] {
        std::unique_lock lock(loop_mu_);
        while (!stopping_) {
            lock.unlock();
            try {
                run_due(clock_.now());
            } catch (const std::exception&) {
            }
            lock.lock();
            loop_cv_.wait_for(lock, interval, [this] { return stopping_; });
        }
    });
}

void Scheduler::stop() {
    {
        std::lock_guard lock(loop_mu_);
        stopping_ = true;
    }
    loop_cv_.notify_all();
    if (loop_.joinable()) loop_.join();
}

void register_schedule_tools(extend::ToolRegistry& tools, JobStore& store, Clock& clock) {
    using extend::ArgField;
    using extend::ArgType;
    tools.register_builtin({"task_add",
                            "Schedule a notify, script, agent or hybrid job.",
                            {{ArgField{"job", ArgType::object, true, "job definition"}}},
                            [&store, &clock](const extend::ToolCallContext& ctx, const nlohmann::json& args) {
                                auto job = job_from_json(args.at("job"));
                                if (job.agent.empty() && (job.mode == JobMode::agent || job.mode == JobMode::hybrid)) {
                                    job.agent = ctx.agent_folder;
                                }
                                return nlohmann::json{{"job_id", store.register_job(job, clock.now())}}.dump();
                            },
                            {},
                            {}});
    tools.register_builtin({"task_list",
                            "List scheduled jobs.",
                            {},
                            [&store](const extend::ToolCallContext&, const nlohmann::json&) {
                                nlohmann::json rows = nlohmann::json::array();
                                for (const auto& j : store.list_jobs()) rows.push_back(to_json(j));
                                return rows.dump();
                            },
                            {},
                            {}});
    tools.register_builtin({"task_cancel",
                            "Cancel a scheduled job.",
                            {{ArgField{"job_id", ArgType::string, true, "job id"}}},
                            [&store](const extend::ToolCallContext&, const nlohmann::json& args) {
                                auto id = args.at("job_id").get<std::string>();
                                store.cancel_job(id);
                                return "cancelled " + id;
                            },
                            {},
                            {}});
}

void register_send_message_tool(extend::ToolRegistry& tools, ChannelSink& sink) {
    using extend::ArgField;
    using extend::ArgType;
    tools.register_builtin({"send_message",
                            "Deliver a message to an outbound channel.",
                            {{ArgField{"message", ArgType::string, true, "text"},
                              ArgField{"channel", ArgType::string, false, "channel name, default stdout"}}},
                            [&sink](const extend::ToolCallContext& ctx, const nlohmann::json& args) {
                                auto channel = args.value("channel", "stdout");
                                sink.deliver(channel, args.at("message").get<std::string>(), ctx.agent_folder);
                                return "delivered to " + channel;
                            },
                            {},
                            {}});
}

}  // namespace semaclaw::schedtask
