#include <gtest/gtest.h>

#include <ctime>
#include <random>
#include <thread>

#include "semaclaw/common/clock.hpp"
#include "semaclaw/extend/tools.hpp"
#include "semaclaw/schedtask/cron.hpp"
#include "semaclaw/schedtask/job.hpp"
#include "semaclaw/schedtask/scheduler.hpp"
#include "test_support.hpp"

namespace semaclaw {
namespace {

using namespace schedtask;
using nlohmann::json;
using testing::errc_of;
using testing::TempDir;
using std::chrono::minutes;

struct Fields {
    int min, hour, dom, mon, dow;
};

Fields fields_of(TimePoint t) {
    auto secs = std::chrono::system_clock::to_time_t(t);
    std::tm tm{};
    gmtime_r(&secs, &tm);
    return {tm.tm_min, tm.tm_hour, tm.tm_mday, tm.tm_mon + 1, tm.tm_wday};
}

TimePoint floor_minute(TimePoint t) { return std::chrono::floor<minutes>(t); }

TEST(Cron, MatchesAgreeWithHandWrittenPredicatesProperty) {
    const std::vector<std::pair<std::string, std::function<bool(const Fields&)>>> cases = {
        {"* * * * *", [](const Fields&) { return true; }},
        {"*/15 9-17 * * 1-5",
         [](const Fields& f) { return f.min % 15 == 0 && f.hour >= 9 && f.hour <= 17 && f.dow >= 1 && f.dow <= 5; }},
        {"0 0 1 * *", [](const Fields& f) { return f.min == 0 && f.hour == 0 && f.dom == 1; }},
        {"5,35 */6 * 2-3 *",
         [](const Fields& f) { return (f.min == 5 || f.min == 35) && f.hour % 6 == 0 && (f.mon == 2 || f.mon == 3); }},
        {"0 12 13 * 5",
         [](const Fields& f) { return f.min == 0 && f.hour == 12 && (f.dom == 13 || f.dow == 5); }},
        {"30 8 * * 7", [](const Fields& f) { return f.min == 30 && f.hour == 8 && f.dow == 0; }},
        {"10-20/5 1 * * *", [](const Fields& f) { return f.hour == 1 && (f.min == 10 || f.min == 15 || f.min == 20); }},
    };
    std::mt19937_64 rng(5);
    const auto base = testing::epoch_2026();
    for (const auto& [text, oracle] : cases) {
        auto spec = CronSpec::parse(text);
        for (int i = 0; i < 3000; ++i) {
            auto t = base + minutes(std::uniform_int_distribution<int>(0, 2 * 366 * 24 * 60)(rng));
            ASSERT_EQ(spec.matches(t), oracle(fields_of(t))) << text << " at " << to_epoch_ms(t);
        }
    }
}

TEST(Cron, NextAfterIsTheFirstMatchingMinuteProperty) {
    std::mt19937_64 rng(9);
    const auto base = testing::epoch_2026();
    for (const auto* text : {"*/7 * * * *", "0 3 * * 1", "45 23 31 * *", "0 0 29 2 *", "15 10 * 6 0-2"}) {
        auto spec = CronSpec::parse(text);
        for (int i = 0; i < 20; ++i) {
            auto t = base + std::chrono::seconds(std::uniform_int_distribution<long>(0, 300L * 24 * 3600)(rng));
            auto next = spec.next_after(t);
            EXPECT_GT(next, t);
            EXPECT_EQ(next, floor_minute(next));
            EXPECT_TRUE(spec.matches(next)) << text;
            // brute force: nothing matches in between
            for (auto m = floor_minute(t) + minutes(1); m < next; m += minutes(1)) {
                ASSERT_FALSE(spec.matches(m)) << text;
            }
        }
    }
}

TEST(Cron, RejectsMalformedSpecs) {
    for (const auto* bad : {"", "* * * *", "60 * * * *", "* 24 * * *", "* * 0 * *", "* * * 13 *", "* * * * 8",
                            "*/0 * * * *", "5-1 * * * *", "a * * * *", "* * * * * *"}) {
        EXPECT_EQ(errc_of([&] { CronSpec::parse(bad); }), Errc::validation) << bad;
    }
}

TEST(Jobs, ValidationFollowsTheMode) {
    auto bad = [](json j) { return errc_of([&] { job_from_json(j).validate(); }); };
    EXPECT_EQ(bad({{"mode", "notify"}, {"cron", "* * * * *"}}), Errc::validation);
    EXPECT_EQ(bad({{"mode", "notify"}, {"message", "m"}}), Errc::validation);
    EXPECT_EQ(bad({{"mode", "notify"}, {"message", "m"}, {"cron", "* * * * *"}, {"at", "2026-03-01T00:00:00Z"}}),
              Errc::validation);
    EXPECT_EQ(bad({{"mode", "script"}, {"cron", "* * * * *"}}), Errc::validation);
    EXPECT_EQ(bad({{"mode", "agent"}, {"cron", "* * * * *"}, {"prompt", "p"}}), Errc::validation);
    EXPECT_EQ(bad({{"mode", "hybrid"}, {"cron", "* * * * *"}, {"command", "c"}, {"agent", "a"}, {"prompt", "p"}}),
              Errc::validation);
    EXPECT_EQ(bad({{"mode", "hybrid"},
                   {"cron", "* * * * *"},
                   {"command", "c"},
                   {"agent", "a"},
                   {"prompt", "{script_output}{script_output}"}}),
              Errc::validation);
    EXPECT_EQ(bad({{"mode", "sometimes"}}), Errc::validation);
    EXPECT_FALSE(bad({{"mode", "hybrid"},
                      {"cron", "* * * * *"},
                      {"command", "c"},
                      {"agent", "a"},
                      {"prompt", "see {script_output}"}}));
}

TEST(Jobs, StoreAssignsIdsDueTimesAndRoundTrips) {
    TempDir d;
    JobStore store(d / "jobs.json");
    auto now = testing::epoch_2026() + std::chrono::seconds(30);
    auto id1 = store.register_job(job_from_json({{"mode", "notify"}, {"message", "m"}, {"cron", "*/10 * * * *"}}), now);
    auto id2 = store.register_job(
        job_from_json({{"mode", "notify"}, {"message", "m"}, {"at", "2026-03-02T08:00:00Z"}}), now);
    EXPECT_NE(id1, id2);
    EXPECT_EQ(store.find(id1)->next_due, testing::epoch_2026() + minutes(10));
    EXPECT_EQ(store.find(id2)->next_due, testing::epoch_2026() + std::chrono::hours(32));
    auto again = job_from_json(to_json(*store.find(id1)));
    EXPECT_EQ(again.cron, store.find(id1)->cron);
    EXPECT_EQ(again.next_due, store.find(id1)->next_due);

    JobStore other(d / "jobs.json");
    EXPECT_EQ(other.list_jobs().size(), 2u);
    other.cancel_job(id1);
    EXPECT_EQ(store.list_jobs().size(), 1u);
    EXPECT_EQ(errc_of([&] { store.cancel_job(id1); }), Errc::not_found);
}

struct RecordingSink : ChannelSink {
    std::mutex mu;
    std::vector<std::tuple<std::string, std::string, std::string>> delivered;
    void deliver(const std::string& c, const std::string& m, const std::string& o) override {
        std::lock_guard lock(mu);
        delivered.emplace_back(c, m, o);
    }
};

struct RecordingAgents : AgentPort {
    std::mutex mu;
    std::vector<std::pair<std::string, std::string>> prompts;
    bool fail = false;
    std::string run_turn(const std::string& agent, const std::string& prompt) override {
        std::lock_guard lock(mu);
        prompts.emplace_back(agent, prompt);
        if (fail) throw std::runtime_error("model down");
        return "reply to " + prompt;
    }
};

struct SchedulerFixture : ::testing::Test {
    TempDir dir;
    FakeClock clock{testing::epoch_2026()};
    JobStore store{dir / "jobs.json"};
    RecordingSink sink;
    RecordingAgents agents;
    Scheduler scheduler{store, sink, agents, clock};

    std::string add(json j) { return store.register_job(job_from_json(j), clock.now()); }
    TimePoint at(int minute) { return testing::epoch_2026() + minutes(minute); }
};

TEST_F(SchedulerFixture, NotifyDeliversWithoutTheModel) {
    auto id = add({{"mode", "notify"}, {"message", "stand up"}, {"channel", "team"}, {"cron", "*/5 * * * *"}});
    auto out = scheduler.run_due(at(5));
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].status, OutcomeStatus::delivered);
    EXPECT_FALSE(out[0].model_invoked);
    EXPECT_EQ(sink.delivered, (decltype(sink.delivered){{"team", "stand up", id}}));
    EXPECT_TRUE(agents.prompts.empty());
}

TEST_F(SchedulerFixture, ScriptCapturesOutputAndExitStatus) {
    add({{"mode", "script"}, {"command", "echo $GREETING; exit 2"}, {"env", {{"GREETING", "hi"}}},
         {"cron", "* * * * *"}});
    auto out = scheduler.run_due(at(1));
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].status, OutcomeStatus::failed);
    EXPECT_EQ(out[0].exit_code, 2);
    EXPECT_EQ(out[0].output, "hi\n");
    EXPECT_FALSE(out[0].model_invoked);
}

TEST_F(SchedulerFixture, ScriptOutputIsCappedAt64KiB) {
    add({{"mode", "script"}, {"command", "head -c 200000 /dev/zero | tr '\\0' x"}, {"cron", "* * * * *"}});
    auto out = scheduler.run_due(at(1));
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].status, OutcomeStatus::succeeded);
    EXPECT_EQ(out[0].output.size(), kMaxScriptOutput);
}

TEST_F(SchedulerFixture, AgentModeRunsATurn) {
    add({{"mode", "agent"}, {"agent", "alpha"}, {"prompt", "summarize inbox"}, {"cron", "* * * * *"}});
    auto out = scheduler.run_due(at(1));
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].status, OutcomeStatus::agent_replied);
    EXPECT_EQ(out[0].reply, "reply to summarize inbox");
    agents.fail = true;
    out = scheduler.run_due(at(2));
    EXPECT_EQ(out[0].status, OutcomeStatus::agent_failed);
    EXPECT_EQ(out[0].error, "model down");
}

TEST_F(SchedulerFixture, HybridSplicesScriptOutputAndSkipsModelOnFailure) {
    add({{"mode", "hybrid"}, {"command", "printf 'disk 91%%'"}, {"agent", "alpha"},
         {"prompt", "check: {script_output}!"}, {"cron", "* * * * *"}});
    add({{"mode", "hybrid"}, {"command", "exit 1"}, {"agent", "alpha"}, {"prompt", "x {script_output}"},
         {"cron", "* * * * *"}});
    auto out = scheduler.run_due(at(1));
    ASSERT_EQ(out.size(), 2u);
    EXPECT_EQ(out[0].status, OutcomeStatus::agent_replied);
    EXPECT_EQ(out[0].prompt, "check: disk 91%!");
    EXPECT_EQ(out[1].status, OutcomeStatus::failed_pre);
    EXPECT_FALSE(out[1].model_invoked);
    EXPECT_EQ(agents.prompts.size(), 1u);
}

TEST_F(SchedulerFixture, OneShotFiresOnceAndCronAdvances) {
    auto once = add({{"mode", "notify"}, {"message", "m"}, {"at", "2026-03-01T00:03:00Z"}});
    auto rec = add({{"mode", "notify"}, {"message", "r"}, {"cron", "*/2 * * * *"}});
    EXPECT_TRUE(scheduler.run_due(at(1)).empty());
    EXPECT_EQ(scheduler.run_due(at(3)).size(), 2u);
    EXPECT_FALSE(store.find(once)->enabled);
    EXPECT_EQ(store.find(rec)->next_due, at(4));
    EXPECT_EQ(scheduler.run_due(at(4)).size(), 1u);
    auto now = scheduler.run_now(once);
    EXPECT_EQ(now.status, OutcomeStatus::delivered);
    EXPECT_EQ(errc_of([&] { scheduler.run_now("job-404"); }), Errc::not_found);
}

TEST_F(SchedulerFixture, OverlappingCallsNeverDoubleFire) {
    add({{"mode", "notify"}, {"message", "m"}, {"cron", "* * * * *"}});
    std::vector<std::thread> threads;
    std::atomic<std::size_t> total{0};
    for (int i = 0; i < 8; ++i) {
        threads.emplace_back([&] { total += scheduler.run_due(at(1)).size(); });
    }
    for (auto& t : threads) t.join();
    EXPECT_EQ(total.load(), 1u);
    EXPECT_EQ(sink.delivered.size(), 1u);
}

TEST(ScheduleTools, AddListCancelAndSendMessage) {
    TempDir d;
    FakeClock clock(testing::epoch_2026());
    JobStore store(d / "jobs.json");
    RecordingSink sink;
    extend::ToolRegistry tools;
    register_schedule_tools(tools, store, clock);
    register_send_message_tool(tools, sink);
    extend::ToolCallContext ctx{"s", "alpha", {}};
    auto added = json::parse(tools.find("task_add")->handler(
        ctx, {{"job", {{"mode", "agent"}, {"prompt", "p"}, {"cron", "0 * * * *"}}}}));
    auto id = added["job_id"].get<std::string>();
    EXPECT_EQ(store.find(id)->agent, "alpha");
    EXPECT_EQ(json::parse(tools.find("task_list")->handler(ctx, json::object())).size(), 1u);
    tools.find("task_cancel")->handler(ctx, {{"job_id", id}});
    EXPECT_TRUE(store.list_jobs().empty());
    tools.find("send_message")->handler(ctx, {{"message", "hello"}, {"channel", "ops"}});
    ASSERT_EQ(sink.delivered.size(), 1u);
    EXPECT_EQ(std::get<0>(sink.delivered[0]), "ops");
    EXPECT_EQ(std::get<1>(sink.delivered[0]), "hello");
    EXPECT_EQ(tools.find("task_add")->tier, extend::Tier::internal);
}

}  // namespace
}  // namespace semaclaw
