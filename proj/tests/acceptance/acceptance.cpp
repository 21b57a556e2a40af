// Prints one [PASS]/[FAIL] line per acceptance criterion; exits non-zero if any fail.

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>

#include <atomic>
#include <chrono>
#include <future>
#include <iostream>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "memory_oracles.hpp"
#include "runtime_harness.hpp"
#include "semaclaw/common/frontmatter.hpp"
#include "semaclaw/common/process.hpp"
#include "semaclaw/common/text.hpp"
#include "semaclaw/dispatch/bridge.hpp"
#include "semaclaw/kernel/tokens.hpp"
#include "semaclaw/memory/hybrid.hpp"
#include "semaclaw/schedtask/scheduler.hpp"
#include "semaclaw/wiki/wiki_store.hpp"

extern char** environ;

namespace semaclaw {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using testing::TempDir;
using Clk = std::chrono::steady_clock;

/// Thrown by check(); the criterion fails with its message.
struct Unmet : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void check(bool ok, const std::string& what) {
    if (!ok) throw Unmet(what);
}

template <class A, class B>
void check_eq(const A& a, const B& b, const std::string& what) {
    if (a == b) return;
    std::ostringstream os;
    os << what << " (got " << a << ", want " << b << ")";
    throw Unmet(os.str());
}

double seconds_since(Clk::time_point t0) { return std::chrono::duration<double>(Clk::now() - t0).count(); }

bool has_all_headings(const std::string& text) {
    return text.find(context::kSoulHeading) != std::string::npos &&
           text.find(context::kMemoryIndexHeading) != std::string::npos &&
           text.find(context::kWorkspaceHeading) != std::string::npos;
}

// 1

void compaction_boundary() {
    const auto t0 = Clk::now();
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<std::size_t> limits(16000, 10'000'000);
    for (int i = 0; i < 200; ++i) {
        const auto L = i == 0 ? std::size_t{16000} : limits(rng);
        // c + 8000 > 0.75 L, decided over the rationals: 4c + 32000 > 3L
        auto fires = [&](std::size_t c) { return 4 * c + 32000 > 3 * L; };
        const auto flip = (3 * L) / 4 - 8000;
        check(!fires(flip) && fires(flip + 1), "oracle disagrees with itself at L=" + std::to_string(L));
        check_eq(kernel::compaction_threshold(L), flip, "threshold at L=" + std::to_string(L));
        for (std::size_t c = flip - 2; c <= flip + 2; ++c) {
            check(kernel::should_compact(c, L) == fires(c), "should_compact(" + std::to_string(c) + ", " +
                                                                std::to_string(L) + ")");
        }
        check(!kernel::should_compact(0, L) && kernel::should_compact(L, L), "extremes at L=" + std::to_string(L));
    }
    check(seconds_since(t0) < 1.0, "took longer than 1 s");
}

// 2

void compaction_mechanics() {
    {
        testing::RuntimeHarness h(json::array({{{"kind", "summary"}, {"text", "earlier: two questions"}},
                                               {{"kind", "reply"}, {"text", "ok"}},
                                               {{"kind", "reply"}, {"text", "ok"}}}));
        auto sid = h.open(16000);
        std::vector<kernel::Message> at_exec;
        extend::HookRegistration probe;
        probe.hook_id = "probe";
        probe.event = extend::HookEvent::compact_exec;
        probe.capability = extend::HookCapability::observe;
        probe.observe = [&](const json&) { at_exec = h.runtime->messages(sid); };
        h.hooks.register_hook(probe);

        const auto room = kernel::compaction_threshold(16000) - kernel::count_tokens(h.runtime->messages(sid));
        check(room > 1000, "system prompt leaves no room");
        check(h.runtime->submit_turn(sid, std::string(room / 2 * 4, 'a')).ok, "first turn");
        auto r = h.runtime->submit_turn(sid, std::string(room * 7 / 10 * 4, 'b'));
        check(r.ok, "second turn: " + r.error);
        check_eq(h.runtime->compaction_count(sid), 1u, "compactions");
        const kernel::RuntimeEvent* start = nullptr;
        const kernel::RuntimeEvent* exec = nullptr;
        for (const auto& e : r.events) {
            if (e.kind == kernel::EventKind::compact_start && !start) start = &e;
            if (e.kind == kernel::EventKind::compact_exec && !exec) exec = &e;
        }
        check(start && exec && start->seq < exec->seq, "compact:start precedes compact:exec");
        const auto before = exec->payload.at("tokens_before").get<std::size_t>();
        const auto after = exec->payload.at("tokens_after").get<std::size_t>();
        check(after < before, "tokens_after < tokens_before");
        check_eq(exec->payload.at("mode").get<std::string>(), std::string("summarized"), "mode");
        check(!at_exec.empty() && has_all_headings(at_exec.back().text), "trailing reminder carries persona headings");
    }
    {
        testing::RuntimeHarness h(json::array({{{"kind", "summary_fail"}},
                                               {{"kind", "reply"}, {"text", "r"}},
                                               {{"kind", "reply"}, {"text", "r"}},
                                               {{"kind", "reply"}, {"text", "r"}}}));
        const std::size_t L = 20000;
        auto sid = h.open(L);
        json payload;
        std::vector<kernel::Message> at_exec;
        extend::HookRegistration probe;
        probe.hook_id = "probe";
        probe.event = extend::HookEvent::compact_exec;
        probe.capability = extend::HookCapability::observe;
        probe.observe = [&](const json& p) {
            payload = p;
            at_exec = h.runtime->messages(sid);
        };
        h.hooks.register_hook(probe);
        for (int i = 0; i < 3; ++i) check(h.runtime->submit_turn(sid, std::string(12000, 'a' + i)).ok, "turn");
        check_eq(h.runtime->compaction_count(sid), 1u, "fallback compactions");
        check_eq(payload.at("mode").get<std::string>(), std::string("truncation_fallback"), "fallback mode");
        const auto recount = kernel::count_tokens(at_exec);
        check(2 * recount <= L, "recount " + std::to_string(recount) + " exceeds half the limit");
        check(has_all_headings(at_exec.back().text), "fallback reminder carries persona headings");
    }
}

// 3

void hybrid_scoring() {
    TempDir dir;
    context::AgentRegistry agents(dir.path());
    auto id = testing::add_agent(agents, "mem");
    const std::vector<std::string> docs = {"alpha beta gamma", "alpha delta", "epsilon zeta",
                                           "beta beta eta",    "theta iota",  "alpha kappa lambda mu"};
    std::map<std::string, memory::Embedding> table = {
        {"alpha beta", {1, 0, 0, 0}}, {docs[0], {3, 4, 0, 0}}, {docs[1], {1, 1, 0, 0}}, {docs[2], {4, 3, 0, 0}},
        {docs[3], {0, 1, 0, 0}},      {docs[4], {0, 0, 1, 0}}, {docs[5], {2, 0, 0, 1}},
    };
    std::string md;
    for (const auto& d : docs) md += d + "\n\n";
    testing::write(id.memory_index_path(), md);
    memory::MemoryOptions opts;
    opts.embedder = std::make_shared<testing::TableEmbedder>(table);
    memory::MemoryStore store(id, opts);
    store.index_sync();
    auto res = store.hybrid_search({"alpha beta", 10, memory::SourceFilter::all});
    check(res.level == memory::SearchLevel::hybrid, "six-document fixture searched at the hybrid level");

    std::map<std::string, std::vector<std::string>> toks;
    for (std::size_t i = 0; i < docs.size(); ++i) toks["MEMORY.md#" + std::to_string(i)] = text::tokenize(docs[i]);
    auto raw = testing::oracle_bm25(toks, {"alpha", "beta"});
    double lo = 1e300, hi = -1e300;
    for (const auto& [doc, s] : raw) lo = std::min(lo, s), hi = std::max(hi, s);
    std::map<std::string, double> fts, vec;
    for (const auto& [doc, s] : raw) fts[doc] = (s - lo) / (hi - lo);
    for (std::size_t i = 0; i < docs.size(); ++i) {
        double c = testing::oracle_cosine(table["alpha beta"], table[docs[i]]);
        if (c >= memory::kVectorQualityThreshold) vec["MEMORY.md#" + std::to_string(i)] = c;
    }
    int both = 0, single = 0;
    check_eq(res.records.size(), std::size_t{5}, "fixture hits");
    for (const auto& r : res.records) {
        bool f = fts.count(r.doc_id) > 0, v = vec.count(r.doc_id) > 0;
        check(f == r.fts_score.has_value() && v == r.vec_score.has_value(), "paths of " + r.doc_id);
        double want = f && v ? 0.7 * vec[r.doc_id] + 0.3 * fts[r.doc_id] : 0.7 * (v ? vec[r.doc_id] : fts[r.doc_id]);
        check(std::abs(r.merged_score - want) <= 1e-12, "merged score of " + r.doc_id);
        (f && v ? both : single)++;
    }
    check(both > 0 && single > 0, "fixture covers both-path and single-path hits");

    // level 2: keyword only, ranked by BM25
    std::mt19937 rng(2025);
    for (int round = 0; round < 60; ++round) {
        TempDir d;
        context::AgentRegistry reg(d.path());
        auto a = testing::add_agent(reg, "mem");
        auto corpus = testing::random_corpus(rng, 50);
        for (const auto& [rel, content] : corpus.files) testing::write(a.data_dir / rel, content);
        memory::MemoryStore s(a, memory::MemoryOptions{});
        s.index_sync();
        auto q = testing::random_query(rng);
        auto got = s.hybrid_search({testing::join(q), 100, memory::SourceFilter::all});
        check(got.level == memory::SearchLevel::keyword_only, "level 2 selected");
        std::map<std::string, std::vector<std::string>> t;
        for (const auto& [doc, p] : corpus.paragraphs) t[doc] = text::tokenize(p);
        auto scores = testing::oracle_bm25(t, q);
        std::vector<std::pair<std::string, double>> want(scores.begin(), scores.end());
        std::sort(want.begin(), want.end(), [](const auto& x, const auto& y) {
            return x.second != y.second ? x.second > y.second : x.first < y.first;
        });
        check_eq(got.records.size(), want.size(), "level 2 hit count");
        for (std::size_t i = 0; i < want.size(); ++i) check_eq(got.records[i].doc_id, want[i].first, "level 2 rank");
    }

    // level 3: raw token overlap
    for (int round = 0; round < 60; ++round) {
        TempDir d;
        context::AgentRegistry reg(d.path());
        auto a = testing::add_agent(reg, "mem");
        auto corpus = testing::random_corpus(rng, 50);
        for (const auto& [rel, content] : corpus.files) testing::write(a.data_dir / rel, content);
        memory::MemoryOptions o;
        o.keyword_enabled = false;
        memory::MemoryStore s(a, o);
        s.index_sync();
        auto q = testing::random_query(rng);
        auto got = s.hybrid_search({testing::join(q), 100, memory::SourceFilter::all});
        check(got.level == memory::SearchLevel::token_scan, "level 3 selected");
        std::set<std::string> wanted(q.begin(), q.end());
        std::vector<std::pair<std::string, int>> want;
        for (const auto& [doc, p] : corpus.paragraphs) {
            auto t = text::tokenize(p);
            std::set<std::string> present(t.begin(), t.end());
            int overlap = 0;
            for (const auto& w : wanted) overlap += static_cast<int>(present.count(w));
            if (overlap > 0) want.emplace_back(doc, overlap);
        }
        std::sort(want.begin(), want.end(), [](const auto& x, const auto& y) {
            return x.second != y.second ? x.second > y.second : x.first < y.first;
        });
        check_eq(got.records.size(), want.size(), "level 3 hit count");
        for (std::size_t i = 0; i < want.size(); ++i) check_eq(got.records[i].doc_id, want[i].first, "level 3 rank");
    }
}

// 4

void retention() {
    TempDir dir;
    context::AgentRegistry agents(dir.path());
    auto id = testing::add_agent(agents, "mem");
    const auto today = testing::epoch_2026();
    std::set<std::string> old_files;
    for (int d = 0; d < 60; ++d) {
        auto name = format_date(today - std::chrono::hours(24 * d)) + ".md";
        testing::write(id.memory_dir() / name, "## 09:00:00\nrollout marker" + std::to_string(d) + "\n\n");
        if (d >= 50) old_files.insert("memory/" + name);
    }
    memory::MemoryStore store(id, memory::MemoryOptions{});
    store.index_sync();
    store.enforce_retention(today);
    std::size_t left = 0;
    for (const auto& e : fs::directory_iterator(id.memory_dir())) left += e.path().extension() == ".md";
    check_eq(left, std::size_t{50}, "logs left");
    auto res = store.hybrid_search({"rollout", 100, memory::SourceFilter::all});
    check_eq(res.records.size(), std::size_t{50}, "hits after retention");
    for (const auto& r : res.records) check(!old_files.count(r.file), "hit from removed file " + r.file);
}

// 5 and 6 share a recording worker port.

struct RecordingPort : dispatch::WorkerPort {
    std::mutex mu;
    std::map<std::string, fs::path> workspaces;
    std::vector<std::tuple<std::string, std::string, std::string>> submitted;  // worker, ref, prompt
    std::function<void(const std::string&)> on_heartbeat;

    fs::path workspace(const std::string& folder) override {
        std::lock_guard lock(mu);
        auto it = workspaces.find(folder);
        return it == workspaces.end() ? fs::path("/home/" + folder) : it->second;
    }
    void set_workspace(const std::string& folder, const fs::path& p) override {
        std::lock_guard lock(mu);
        workspaces[folder] = p;
    }
    void submit(const std::string& folder, const std::string& ref, const std::string& prompt) override {
        std::lock_guard lock(mu);
        submitted.emplace_back(folder, ref, prompt);
    }
    void heartbeat(const std::string& admin) override {
        if (on_heartbeat) on_heartbeat(admin);
    }
};

struct DagRun {
    std::vector<std::string> revisions;  // every written state, serialized
    std::map<dispatch::TaskStatus, int> outcomes;
    std::uint64_t stale = 0;
};

/// One randomized DAG driven to completion on a fake clock. Invariants are
/// checked against the state after every write.
DagRun run_random_dag(std::uint32_t seed) {
    std::mt19937 rng(seed);
    TempDir dir;
    FakeClock clock(testing::epoch_2026());
    context::AgentRegistry agents(dir.path());
    const std::vector<std::string> workers{"w1", "w2", "w3"};
    testing::add_agent(agents, "boss");
    for (const auto& w : workers) testing::add_agent(agents, w);
    dispatch::StateStore store(dir / "dispatch.json");
    RecordingPort port;
    dispatch::DispatchBridge bridge(store, agents, port, clock);

    const int n = std::uniform_int_distribution<int>(1, 12)(rng);
    std::vector<dispatch::TaskSpec> specs;
    std::map<std::string, std::vector<std::string>> deps_of;
    for (int i = 0; i < n; ++i) {
        std::vector<std::string> deps;
        for (int j = 0; j < i; ++j) {
            if (rng() % 3 == 0) deps.push_back("t" + std::to_string(j));
        }
        auto label = "t" + std::to_string(i);
        deps_of[label] = deps;
        specs.push_back({label, workers[rng() % workers.size()], "work", deps,
                         std::chrono::seconds(std::uniform_int_distribution<int>(5, 60)(rng))});
    }

    DagRun run;
    std::set<std::string> started;
    std::string violation;
    bool created = false;  // creation persists the group; the first tick dispatches it
    store.set_write_observer([&](const dispatch::DispatchState& s) {
        run.revisions.push_back(dispatch::to_json(s).dump());
        for (const auto& g : s.groups) {
            std::map<std::string, dispatch::TaskStatus> status;
            for (const auto& t : g.tasks) status[t.label] = t.status;
            std::set<std::string> busy;
            for (const auto& [w, ref] : s.worker_assignments) busy.insert(w);
            for (const auto& t : g.tasks) {
                bool deps_terminal = std::all_of(t.depends_on.begin(), t.depends_on.end(),
                                                 [&](const auto& d) { return dispatch::is_terminal(status[d]); });
                // dependency safety: nothing leaves registered before its deps are terminal
                if (t.status != dispatch::TaskStatus::registered && !started.count(t.label)) {
                    if (!deps_terminal && violation.empty()) {
                        violation = t.label + " started before its dependencies finished";
                    }
                    started.insert(t.label);
                }
                // terminal-unblock equivalence: the oracle's ready set is exactly what is
                // runnable; a ready task may wait only for its worker
                if (created && violation.empty() && g.status == dispatch::GroupStatus::active &&
                    t.status == dispatch::TaskStatus::registered && deps_terminal && !busy.count(t.worker)) {
                    violation = t.label + " was ready with an idle worker but not dispatched";
                }
            }
        }
    });

    auto group = bridge.create_parent("boss", "goal", specs);
    check(group.status == dispatch::GroupStatus::active, "group active");
    created = true;

    struct Pending {
        TimePoint due;
        std::string worker;
        std::string ref;
        int outcome;  // 0 reply, 1 error, 2 never answers in time
    };
    std::vector<Pending> pending;
    std::size_t seen = 0;
    auto collect = [&] {
        for (; seen < port.submitted.size(); ++seen) {
            auto [worker, ref, prompt] = port.submitted[seen];
            auto label = dispatch::split_task_ref(ref).second;
            auto timeout = *specs[std::stoul(label.substr(1))].timeout;
            int outcome = static_cast<int>(rng() % 3);
            auto latency = outcome == 2 ? timeout + std::chrono::seconds(1 + rng() % 20)
                                        : std::chrono::milliseconds(1 + rng() % (timeout.count() - 1));
            pending.push_back({clock.now() + latency, worker, ref, outcome});
        }
    };
    bridge.tick();
    collect();
    for (int guard = 0; guard < 10000; ++guard) {
        auto s = store.read();
        if (s.groups[0].status == dispatch::GroupStatus::done && pending.empty()) break;
        std::optional<TimePoint> next;
        for (const auto& p : pending) next = next ? std::min(*next, p.due) : p.due;
        for (const auto& t : s.groups[0].tasks) {
            if (t.status == dispatch::TaskStatus::processing && t.timeout_at) {
                next = next ? std::min(*next, *t.timeout_at) : *t.timeout_at;
            }
        }
        check(next.has_value(), "dispatch stalled with work outstanding");
        clock.set(std::max(*next, clock.now()));
        std::stable_sort(pending.begin(), pending.end(), [](const auto& a, const auto& b) { return a.due < b.due; });
        while (!pending.empty() && pending.front().due <= clock.now()) {
            auto p = pending.front();
            pending.erase(pending.begin());
            if (p.outcome == 1) {
                bridge.notify_error(p.worker, "failed", p.ref);
            } else {
                bridge.notify_reply(p.worker, "ok", p.ref);  // outcome 2 arrives late and is stale
            }
            collect();
        }
        bridge.tick();
        collect();
        check(violation.empty(), violation);
    }
    check(violation.empty(), violation);

    auto s = store.read();
    const auto& g = s.groups[0];
    check(g.status == dispatch::GroupStatus::done, "group completes");
    check(s.worker_assignments.empty() && s.saved_workspaces.empty(), "no assignments or saved workspaces remain");
    for (const auto& t : g.tasks) {
        check(dispatch::is_terminal(t.status), t.label + " terminal");
        check(started.count(t.label) > 0, t.label + " was dispatched (terminal states unblock dependents)");
        run.outcomes[t.status]++;
    }
    run.stale = bridge.stale_notifications();
    return run;
}

void dispatch_correctness() {
    const auto t0 = Clk::now();
    std::map<dispatch::TaskStatus, int> outcomes;
    std::uint64_t stale = 0;
    for (std::uint32_t seed = 0; seed < 1000; ++seed) {
        auto first = run_random_dag(seed);
        for (const auto& [status, n] : first.outcomes) outcomes[status] += n;
        stale += first.stale;
        if (seed % 10 == 0) {
            auto again = run_random_dag(seed);
            check(first.revisions == again.revisions, "seed " + std::to_string(seed) + " did not reproduce");
        }
    }
    for (auto st : {dispatch::TaskStatus::done, dispatch::TaskStatus::error, dispatch::TaskStatus::timeout}) {
        check(outcomes[st] > 0, "no task ended " + std::string(dispatch::to_string(st)));
    }
    check(stale > 0, "no late reply was exercised");
    check(seconds_since(t0) < 60.0, "took " + std::to_string(seconds_since(t0)) + " s");
}

// 6

std::vector<std::string> project(const std::vector<dispatch::DispatchAction>& actions) {
    std::vector<std::string> out;
    for (const auto& a : actions) {
        std::string s(dispatch::to_string(a.kind));
        if (!a.label.empty()) s += " " + a.label;
        if (!a.worker.empty()) s += " @" + a.worker;
        if (a.kind == dispatch::ActionKind::finished || a.kind == dispatch::ActionKind::workspace_restored) {
            s += " " + a.detail;
        }
        out.push_back(s);
    }
    return out;
}

std::string joined(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += "[" + x + "]";
    return s;
}

void timeout_and_restore() {
    TempDir dir;
    FakeClock clock(testing::epoch_2026());
    context::AgentRegistry agents(dir.path());
    for (auto f : {"boss", "w1", "w2"}) testing::add_agent(agents, f);
    dispatch::StateStore store(dir / "dispatch.json");
    RecordingPort port;
    port.workspaces["boss"] = "/srv/project";
    dispatch::DispatchBridge bridge(store, agents, port, clock);
    using S = std::vector<std::string>;
    auto expect = [](const std::vector<dispatch::DispatchAction>& got, const S& want, const std::string& step) {
        check(project(got) == want, step + ": " + joined(project(got)) + " != " + joined(want));
    };

    auto g = bridge.create_parent("boss", "release",
                                  {{"a", "w1", "build", {}, std::chrono::seconds(5)},
                                   {"b", "w2", "test", {"a"}, std::nullopt},
                                   {"c", "w1", "package", {"a"}, std::nullopt},
                                   {"d", "w2", "publish", {"b"}, std::nullopt}});
    const auto ref = [&](const std::string& l) { return dispatch::task_ref(g.group_id, l); };
    expect(bridge.tick(), {"dispatched a @w1"}, "start");
    check_eq(port.workspaces["w1"].string(), std::string("/srv/project"), "worker moved into the shared workspace");
    const auto deadline = *store.read().task(ref("a"))->timeout_at;
    check(deadline == testing::epoch_2026() + std::chrono::seconds(5), "timeout_at is start + 5 s");

    clock.set(deadline - std::chrono::milliseconds(1));
    expect(bridge.tick(), {}, "one millisecond early");
    clock.set(deadline);
    // (a) timeout exactly at timeout_at, (b) dependents dispatched anyway, (c) w1 reassigned so not restored
    expect(bridge.tick(), {"timed_out a @w1", "dispatched b @w2", "dispatched c @w1"}, "at the deadline");
    auto a = *store.read().task(ref("a"));
    check(a.status == dispatch::TaskStatus::timeout && a.finished_at == deadline, "a timed out at its deadline");
    check_eq(port.workspaces["w1"].string(), std::string("/srv/project"), "reassigned worker keeps the workspace");

    expect(bridge.notify_reply("w1", "late build", ref("a")), {}, "late reply");
    check_eq(bridge.stale_notifications(), 1u, "stale replies");
    expect(bridge.notify_reply("w2", "tests green", ref("b")), {"finished b @w2 done", "dispatched d @w2"},
           "b finishes, d follows on the same worker");
    // (c) w1 has nothing left, so its own workspace comes back
    expect(bridge.notify_reply("w1", "pkg.tar", ref("c")), {"finished c @w1 done", "workspace_restored @w1 /home/w1"},
           "c finishes");
    check_eq(port.workspaces["w1"].string(), std::string("/home/w1"), "idle worker restored");

    // (d) a restart while d is processing marks it interrupted
    dispatch::DispatchBridge restarted(store, agents, port, clock);
    auto report = restarted.recover_on_startup();
    check(report.groups == S{g.group_id} && report.tasks == S{ref("d")}, "recovery report");
    auto d = *store.read().task(ref("d"));
    check(d.status == dispatch::TaskStatus::error && d.error == "interrupted", "d marked error(interrupted)");
    check(store.read().group(g.group_id)->status == dispatch::GroupStatus::done, "group closed by recovery");
    check(restarted.recover_on_startup().empty(), "recovery is idempotent");
}

// 7

void bridge_multiplexing() {
    for (unsigned seed = 0; seed < 5; ++seed) {
        FakeClock clock;
        permbridge::PermissionBridge bridge(clock);
        constexpr int n = 64;
        std::vector<permbridge::Decision> got(n);
        std::vector<std::thread> threads;
        for (int i = 0; i < n; ++i) {
            threads.emplace_back([&, i] {
                got[i] = bridge.request_tool_permission({"s" + std::to_string(i), "a"}, "tool", {{"i", i}}, "");
            });
        }
        for (int spin = 0; bridge.list_pending().size() < n; ++spin) {
            check(spin < 20000, "suspensions did not all register");
            std::this_thread::sleep_for(std::chrono::milliseconds(1));
        }
        auto pending = bridge.list_pending();
        std::shuffle(pending.begin(), pending.end(), std::mt19937(seed));
        // each caller's decision is derived from its own arguments
        auto decide = [](int i) {
            switch (i % 3) {
                case 0: return permbridge::Decision::approve();
                case 1: return permbridge::Decision::deny("no " + std::to_string(i));
                default: return permbridge::Decision::modify({{"echo", i}});
            }
        };
        for (const auto& p : pending) bridge.resolve(p.request_id, decide(p.args.at("i").get<int>()));
        for (auto& t : threads) t.join();
        for (int i = 0; i < n; ++i) {
            check(got[i] == decide(i), "caller " + std::to_string(i) + " received someone else's decision");
        }
    }

    // a blocked dispatch_wait keeps the admin session alive through heartbeats
    testing::RuntimeHarness h;
    testing::add_agent(h.agents, "w1");
    testing::add_agent(h.agents, "idler");
    auto admin = h.open();
    kernel::SessionConfig idle_cfg;
    idle_cfg.agent_id = "idler";
    auto idle = h.runtime->open_session(idle_cfg);
    dispatch::StateStore store(h.dir / "dispatch.json");
    RecordingPort port;
    port.on_heartbeat = [&](const std::string& folder) { h.runtime->touch_agent(folder); };
    dispatch::DispatchBridge bridge(store, h.agents, port, h.clock);
    std::vector<std::string> reaped;
    h.clock.every_advance([&] {
        for (auto& s : h.runtime->reap_idle()) reaped.push_back(s);
    });
    auto g = bridge.create_parent("alpha", "long job", {{"a", "w1", "crunch", {}, std::chrono::minutes(40)}});
    bridge.tick();
    const auto start = h.clock.now();
    h.clock.at(start + std::chrono::minutes(35), [&] { bridge.notify_reply("w1", "crunched"); });
    auto t = bridge.dispatch_wait(dispatch::task_ref(g.group_id, "a"));
    check(t.status == dispatch::TaskStatus::done && t.result == "crunched", "wait returns the reply");
    check(h.clock.now() - start >= std::chrono::minutes(35), "the wait lasted 35 minutes");
    check(bridge.heartbeats() >= 17, "heartbeats every 2 minutes (" + std::to_string(bridge.heartbeats()) + ")");
    check(h.runtime->is_open(admin), "admin session idled out during the wait");
    check(std::find(reaped.begin(), reaped.end(), idle) != reaped.end(), "reaper was live (idle session kept)");
}

// 8

struct CountingAgents : schedtask::AgentPort {
    testing::RuntimeHarness& h;
    std::mutex mu;
    explicit CountingAgents(testing::RuntimeHarness& harness) : h(harness) {}
    std::string run_turn(const std::string&, const std::string& prompt) override {
        std::lock_guard lock(mu);
        auto sid = h.open();
        auto r = h.runtime->submit_turn(sid, prompt);
        h.runtime->close_session(sid);
        if (!r.ok) throw std::runtime_error(r.error);
        return r.reply;
    }
    std::size_t adapter_calls() {
        std::lock_guard lock(mu);
        std::size_t n = 0;
        for (const auto& a : h.adapters) n += a->step_calls();
        return n;
    }
};

struct NullSink : schedtask::ChannelSink {
    std::atomic<int> delivered{0};
    void deliver(const std::string&, const std::string&, const std::string&) override { ++delivered; }
};

void scheduler_modes() {
    testing::RuntimeHarness h(json::array({{{"kind", "reply"}, {"echo", true}}}));
    CountingAgents agents(h);
    NullSink sink;
    schedtask::JobStore store(h.dir / "jobs.json");
    schedtask::Scheduler scheduler(store, sink, agents, h.clock);
    auto add = [&](json j) { return store.register_job(schedtask::job_from_json(j), h.clock.now()); };
    // script output with characters a template engine might touch
    const std::string produced = "cpu=91% {script_output} $HOME \"q\"\t\\n\n";
    add({{"mode", "notify"}, {"message", "stand up"}, {"cron", "*/15 * * * *"}});
    add({{"mode", "script"}, {"command", "echo tick"}, {"cron", "5 */2 * * *"}});
    add({{"mode", "agent"}, {"agent", "alpha"}, {"prompt", "summarize"}, {"cron", "0 */3 * * *"}});
    add({{"mode", "hybrid"}, {"agent", "alpha"}, {"command", "printf '%s\\t\\\\n\\n' 'cpu=91% {script_output} $HOME \"q\"'"},
         {"prompt", "report: {script_output}<end>"}, {"cron", "30 */4 * * *"}});

    std::map<schedtask::JobMode, int> fired;
    for (int minute = 1; minute <= 24 * 60; ++minute) {
        h.clock.set(testing::epoch_2026() + std::chrono::minutes(minute));
        for (const auto& o : scheduler.run_due(h.clock.now())) {
            fired[o.mode]++;
            bool model = o.mode == schedtask::JobMode::agent || o.mode == schedtask::JobMode::hybrid;
            check(o.model_invoked == model, "model_invoked for " + std::string(schedtask::to_string(o.mode)));
            if (o.mode == schedtask::JobMode::hybrid) {
                check(o.output == produced, "script stdout captured verbatim");
                check(o.prompt == "report: " + produced + "<end>", "hybrid prompt splices stdout verbatim");
                check(o.reply == o.prompt, "the model saw the spliced prompt");
            }
        }
    }
    // minute-by-minute oracle over (0, 1440]
    int notify = 0, script = 0, agent = 0, hybrid = 0;
    for (int m = 1; m <= 1440; ++m) {
        int hh = (m / 60) % 24, mm = m % 60;
        notify += mm % 15 == 0;
        script += mm == 5 && hh % 2 == 0;
        agent += mm == 0 && hh % 3 == 0;
        hybrid += mm == 30 && hh % 4 == 0;
    }
    check_eq(fired[schedtask::JobMode::notify], notify, "notify firings");
    check_eq(fired[schedtask::JobMode::script], script, "script firings");
    check_eq(fired[schedtask::JobMode::agent], agent, "agent firings");
    check_eq(fired[schedtask::JobMode::hybrid], hybrid, "hybrid firings");
    check_eq(agents.adapter_calls(), static_cast<std::size_t>(agent + hybrid), "adapter calls");
    check_eq(sink.delivered.load(), notify, "notify deliveries");
}

// 9

void wiki_contracts() {
    TempDir dir;
    FakeClock clock(testing::epoch_2026());
    context::AgentRegistry agents(dir.path());
    auto alpha = testing::add_agent(agents, "alpha");
    auto stopwords = std::make_shared<text::StopwordList>();
    wiki::WikiStore store(alpha.wiki_root(), alpha.index_dir() / "wiki.json", stopwords, clock);

    std::mt19937 rng(500);
    const std::vector<std::string> pieces = {"---\n", "title: fake\n", "- item\n", "text ", "\n\n", "  indent\n",
                                             "# h\n", "tags: [x]\n", "ünïcödé ", "\r\n", "\t", ": ", "---", std::string(1, '\0')};
    for (int round = 0; round < 500; ++round) {
        std::string body;
        int n = std::uniform_int_distribution<int>(0, 16)(rng);
        for (int i = 0; i < n; ++i) body += pieces[rng() % pieces.size()];
        std::string source = round % 2 ? "---\ntags: [orig]\n---\n" + body : body;
        const auto expected = parse_frontmatter(source).body;
        auto src = dir / ("drop/n" + std::to_string(round) + ".md");
        testing::write(src, source);
        auto rel = store.organize_file(src.string(), "sorted", {"filed"});
        auto doc = parse_frontmatter(store.read_entry(rel));
        check(doc.header.has_value(), "organized entry has a header");
        check(doc.body == expected, "body bytes changed in round " + std::to_string(round));
        check(fsutil::read_file(src) == source, "source file changed");
    }

    memory::MemoryStore mem(alpha, memory::MemoryOptions{});
    testing::write(alpha.memory_index_path(), "zebra stripes recorded in memory\n\nshared word harbor\n");
    store.save_entry("Giraffe", "giraffe necks recorded in the wiki", {"zoo"}, std::nullopt);
    store.save_entry("Harbor", "shared word harbor", {}, std::nullopt);
    mem.index_sync();
    store.index_sync();
    check(store.search(std::string("zebra"), std::nullopt, 10).empty(), "memory text surfaced in wiki search");
    check(mem.hybrid_search({"giraffe", 10, memory::SourceFilter::all}).records.empty(),
          "wiki text surfaced in memory search");
    for (const auto& hit : store.search(std::string("harbor"), std::nullopt, 10)) {
        check(hit.path.rfind("inbox/", 0) == 0, "wiki hit outside the wiki: " + hit.path);
    }
    for (const auto& r : mem.hybrid_search({"harbor", 10, memory::SourceFilter::all}).records) {
        check(r.file == "MEMORY.md", "memory hit outside memory: " + r.file);
    }

    testing::write(alpha.wiki_root() / "field/notes.md", "---\ntags: [hand]\n---\nwritten outside\n");
    bool found = false;
    for (const auto& c : store.inspect_tree().children) {
        if (c.name != "field") continue;
        found = c.children.size() == 1 && c.children[0].path == "field/notes.md" &&
                c.children[0].tags == std::vector<std::string>{"hand"};
    }
    check(found, "external edit not visible in the tree");
    fs::remove(alpha.wiki_root() / "field/notes.md");
    for (const auto& c : store.inspect_tree().children) {
        if (c.name == "field") check(c.children.empty(), "external delete not visible in the tree");
    }
}

// 10

std::string quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) out += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return out + "'";
}

void end_to_end() {
    const std::string exe = SEMACLAW_CLI;
    TempDir dir;
    const auto root = dir.path().string();
    const std::string reply = "fetched it, all done";
    testing::write(dir / "program.json",
                   json::array({{{"kind", "tool_call"}, {"tool", "fetch"}, {"args", {{"url", "http://example.test"}}},
                                 {"rationale", "need the page"}},
                                {{"kind", "reply"}, {"text", reply}}})
                       .dump());
    testing::write(dir / "semaclaw.conf", "[model]\nadapter = scripted:program.json\n[memory]\nembeddings = false\n");
    testing::write(dir / "tools/fetch.json",
                   R"({"name":"fetch","description":"get a url",)"
                   R"("schema":{"fields":[{"name":"url","type":"string","required":true}]},"command":"echo page"})");
    const auto cli = quote(exe) + " --data-root " + quote(root) + " ";
    auto run = [&](const std::string& args) { return run_shell(cli + args, ProcessOptions{}); };
    check_eq(run("agent add alpha").exit_code, 0, "agent add");

    // the daemon is its own process
    auto log = (dir / "serve.log").string();
    posix_spawn_file_actions_t fa;
    posix_spawn_file_actions_init(&fa);
    posix_spawn_file_actions_addopen(&fa, 1, log.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    posix_spawn_file_actions_adddup2(&fa, 1, 2);
    std::vector<std::string> argv_s{exe, "--data-root", root, "serve", "--port", "0"};
    std::vector<char*> argv;
    for (auto& a : argv_s) argv.push_back(a.data());
    argv.push_back(nullptr);
    pid_t daemon = 0;
    int rc = posix_spawn(&daemon, exe.c_str(), &fa, nullptr, argv.data(), environ);
    posix_spawn_file_actions_destroy(&fa);
    check(rc == 0, "spawning the daemon failed");
    struct Reap {
        pid_t pid;
        ~Reap() {
            ::kill(pid, SIGTERM);
            int st = 0;
            ::waitpid(pid, &st, 0);
        }
    } reap{daemon};

    for (int i = 0; !fs::exists(dir / "daemon.json"); ++i) {
        check(i < 1000, "daemon never published its endpoint: " + fsutil::try_read_file(log).value_or(""));
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    auto turn = std::async(std::launch::async, [&] { return run("--json turn alpha 'fetch the page'"); });

    std::string request_id;
    for (int i = 0; request_id.empty(); ++i) {
        check(i < 500, "no pending approval appeared");
        auto listed = run("--json approvals list");
        check_eq(listed.exit_code, 0, "approvals list");
        auto pending = json::parse(listed.out);
        if (!pending.empty()) {
            check_eq(pending[0].at("tool").get<std::string>(), std::string("fetch"), "pending tool");
            request_id = pending[0].at("request_id").get<std::string>();
        } else {
            std::this_thread::sleep_for(std::chrono::milliseconds(20));
        }
    }
    check(turn.wait_for(std::chrono::milliseconds(0)) != std::future_status::ready, "turn did not suspend");
    auto approved = run("approvals approve " + request_id);
    check_eq(approved.exit_code, 0, "approvals approve");
    check(turn.wait_for(std::chrono::seconds(60)) == std::future_status::ready, "turn did not resume");
    auto done = turn.get();
    check_eq(done.exit_code, 0, "turn exit status");
    auto result = json::parse(done.out);
    check(result.at("ok").get<bool>(), "turn failed");
    check_eq(result.at("reply").get<std::string>(), reply, "final reply");
    check_eq(run("approvals approve " + request_id).exit_code == 0, false, "second approval accepted");
}

}  // namespace
}  // namespace semaclaw

int main() {
    using namespace semaclaw;
    const std::vector<std::pair<std::string, void (*)()>> criteria = {
        {"compaction boundary flips at floor(0.75L)-8000 for 200 random limits", compaction_boundary},
        {"compaction summary and truncation-fallback mechanics", compaction_mechanics},
        {"hybrid merge formula and degraded levels match brute-force oracles", hybrid_scoring},
        {"retention keeps 50 of 60 daily logs and drops their hits", retention},
        {"1000 randomized DAGs: dependency safety, unblock equivalence, completion, reproducibility",
         dispatch_correctness},
        {"timeout at timeout_at, downstream dispatch, workspace restore, startup recovery", timeout_and_restore},
        {"64 concurrent suspensions and a 35-minute heartbeat wait", bridge_multiplexing},
        {"scheduler modes over a scripted day", scheduler_modes},
        {"wiki organize byte identity, corpus separation, live tree", wiki_contracts},
        {"two-process CLI turn suspended and approved", end_to_end},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        std::string why;
        try {
            fn();
        } catch (const std::exception& e) {
            why = e.what();
        }
        std::cout << (why.empty() ? "[PASS] " : "[FAIL] ") << name << (why.empty() ? "" : ": " + why) << std::endl;
        failed += !why.empty();
    }
    return failed == 0 ? 0 : 1;
}
