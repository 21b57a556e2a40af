#include <gtest/gtest.h>

#include <random>
#include <thread>

#include "semaclaw/common/clock.hpp"
#include "semaclaw/common/frontmatter.hpp"
#include "semaclaw/common/lock.hpp"
#include "semaclaw/common/process.hpp"
#include "semaclaw/common/text.hpp"
#include "semaclaw/context/persona.hpp"
#include "semaclaw/context/registry.hpp"
#include "test_support.hpp"

namespace semaclaw {
namespace {

using testing::errc_of;
using testing::TempDir;

TEST(Text, TokenizeLowercasesAndKeepsUtf8) {
    EXPECT_EQ(text::tokenize("Hello, World-42 naïve"),
              (std::vector<std::string>{"hello", "world", "42", "naïve"}));
    EXPECT_TRUE(text::tokenize("  ,.;  ").empty());
}

TEST(Text, StopwordsFilterOnlyListedWords) {
    text::StopwordList sw({"the", "a"});
    EXPECT_EQ(sw.filter({"the", "cat", "a", "hat"}), (std::vector<std::string>{"cat", "hat"}));
    EXPECT_TRUE(text::StopwordList().contains("the"));
}

TEST(Text, SlugifyAndParagraphs) {
    EXPECT_EQ(text::slugify("Deploy  Notes: v2!"), "deploy-notes-v2");
    EXPECT_EQ(text::slugify("!!!"), "");
    EXPECT_EQ(text::paragraphs("a\nb\n\n\n  \nc\n"), (std::vector<std::string>{"a\nb", "c"}));
}

TEST(Frontmatter, ParsesHeaderAndBody) {
    auto doc = parse_frontmatter("---\ntitle: X\ntags: [a, b]\n---\nbody\n");
    ASSERT_TRUE(doc.header);
    EXPECT_EQ((*doc.header)["title"], "X");
    EXPECT_EQ((*doc.header)["tags"].size(), 2u);
    EXPECT_EQ(doc.body, "body\n");
}

TEST(Frontmatter, LookalikesAreBody) {
    for (std::string s : {"no header\n", "---\nunclosed: yes\n", " ---\na: b\n---\n", "---\n- a\n- b\n---\nx\n"}) {
        auto doc = parse_frontmatter(s);
        EXPECT_FALSE(doc.header) << s;
        EXPECT_EQ(doc.body, s);
    }
}

TEST(Frontmatter, RenderKeepsBodyBytesProperty) {
    std::mt19937 rng(7);
    const std::string alphabet = "ab -:\n#\t---{}[]\"'\\";
    for (int round = 0; round < 300; ++round) {
        std::string body;
        std::uniform_int_distribution<int> len(0, 80), pick(0, static_cast<int>(alphabet.size()) - 1);
        for (int i = len(rng); i > 0; --i) body += alphabet[pick(rng)];
        nlohmann::ordered_json header{{"title", "t" + std::to_string(round)}, {"tags", {"x"}}};
        auto doc = parse_frontmatter(render_frontmatter(header, body));
        ASSERT_TRUE(doc.header);
        EXPECT_EQ(doc.body, body);
        EXPECT_EQ((*doc.header)["title"], header["title"]);
    }
}

TEST(Fs, ResolveInsideRejectsEscapes) {
    TempDir d;
    EXPECT_EQ(fsutil::resolve_inside(d.path(), "a/./b/../c.md"), d.path() / "a/c.md");
    EXPECT_EQ(errc_of([&] { fsutil::resolve_inside(d.path(), "../x"); }), Errc::validation);
    EXPECT_EQ(errc_of([&] { fsutil::resolve_inside(d.path(), "a/../../x"); }), Errc::validation);
    EXPECT_EQ(errc_of([&] { fsutil::resolve_inside(d.path(), "/etc/passwd"); }), Errc::validation);
    EXPECT_TRUE(fsutil::is_inside(d.path(), d.path() / "q"));
    EXPECT_FALSE(fsutil::is_inside(d.path() / "q", d.path()));
}

TEST(Fs, AtomicWriteAndRead) {
    TempDir d;
    fsutil::atomic_write(d / "f", "one");
    fsutil::atomic_write(d / "f", "two");
    EXPECT_EQ(fsutil::read_file(d / "f"), "two");
    EXPECT_FALSE(fsutil::try_read_file(d / "missing"));
    EXPECT_EQ(errc_of([&] { fsutil::read_file(d / "missing"); }), Errc::io);
}

TEST(Lock, AdvisoryLockExcludesSecondHolder) {
    TempDir d;
    {
        auto held = AdvisoryLock::acquire_nonblocking(d / "l");
        EXPECT_EQ(errc_of([&] { AdvisoryLock::acquire_nonblocking(d / "l"); }), Errc::lock_contention);
    }
    EXPECT_FALSE(errc_of([&] { AdvisoryLock::acquire_nonblocking(d / "l"); }));
}

TEST(Lock, ExclusiveLockFileSerializesThreads) {
    TempDir d;
    int counter = 0;
    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t) {
        threads.emplace_back([&] {
            for (int i = 0; i < 50; ++i) {
                ExclusiveLockFile lock(d / "x.lock");
                lock.lock();
                int v = counter;
                std::this_thread::yield();
                counter = v + 1;
                lock.unlock();
            }
        });
    }
    for (auto& t : threads) t.join();
    EXPECT_EQ(counter, 200);
}

TEST(Lock, ExclusiveLockFileTimesOut) {
    TempDir d;
    ExclusiveLockFile a(d / "y.lock");
    a.lock();
    ExclusiveLockFile b(d / "y.lock", {std::chrono::milliseconds(20), std::chrono::seconds(30),
                                       std::chrono::microseconds(200)});
    EXPECT_FALSE(b.try_lock());
    EXPECT_EQ(errc_of([&] { b.lock(); }), Errc::lock_contention);
}

TEST(Clock, FakeClockRunsCallbacksInOrder) {
    FakeClock c(testing::epoch_2026());
    std::vector<int> fired;
    int advances = 0;
    c.at(testing::epoch_2026() + std::chrono::seconds(10), [&] { fired.push_back(10); });
    c.at(testing::epoch_2026() + std::chrono::seconds(5), [&] { fired.push_back(5); });
    c.every_advance([&] { ++advances; });
    c.advance(std::chrono::seconds(7));
    EXPECT_EQ(fired, std::vector<int>{5});
    c.advance(std::chrono::seconds(7));
    EXPECT_EQ(fired, (std::vector<int>{5, 10}));
    EXPECT_GE(advances, 2);
    EXPECT_EQ(format_date(c.now()), "2026-03-01");
    EXPECT_EQ(to_epoch_ms(from_epoch_ms(123456)), 123456);
}

TEST(Process, StdinStdoutExitAndTimeout) {
    ProcessOptions o;
    o.stdin_data = "hello";
    auto r = run_shell("cat; echo err >&2; exit 5", o);
    EXPECT_EQ(r.out, "hello");
    EXPECT_EQ(r.err, "err\n");
    EXPECT_EQ(r.exit_code, 5);
    o.stdin_data.clear();
    o.timeout = std::chrono::milliseconds(100);
    auto slow = run_shell("sleep 5", o);
    EXPECT_TRUE(slow.timed_out);
    EXPECT_EQ(slow.exit_code, -1);
}

TEST(Agents, RegistryPersistsAndSeeds) {
    TempDir d;
    context::AgentRegistry reg(d.path());
    auto a = testing::add_agent(reg, "alpha", "Alpha");
    EXPECT_EQ(a.data_dir, d.path() / "agents/alpha");
    EXPECT_TRUE(std::filesystem::exists(a.soul_path()));
    EXPECT_TRUE(std::filesystem::is_directory(a.wiki_root() / "inbox"));
    EXPECT_EQ(errc_of([&] { testing::add_agent(reg, "alpha"); }), Errc::validation);
    EXPECT_EQ(errc_of([&] { testing::add_agent(reg, "../evil"); }), Errc::validation);
    EXPECT_EQ(errc_of([&] { testing::add_agent(reg, ".hidden"); }), Errc::validation);

    context::AgentRegistry other(d.path());
    ASSERT_TRUE(other.find_folder("alpha"));
    EXPECT_EQ(other.find_folder("alpha")->name, "Alpha");
}

TEST(Agents, SeedingNeverOverwritesSoul) {
    TempDir d;
    context::AgentRegistry reg(d.path());
    auto a = testing::add_agent(reg, "alpha");
    testing::write(a.soul_path(), "custom soul");
    EXPECT_FALSE(context::ensure_agent_dirs(a));
    EXPECT_EQ(fsutil::read_file(a.soul_path()), "custom soul");
}

TEST(Persona, ResolveIsAPureReadOfThreeFiles) {
    TempDir d;
    context::AgentRegistry reg(d.path());
    auto a = testing::add_agent(reg, "alpha");
    testing::write(a.soul_path(), "S");
    testing::write(a.memory_index_path(), "M");
    testing::write(a.default_workspace / "AGENTS.md", "W");
    auto p = context::resolve_persona(a, a.default_workspace);
    EXPECT_EQ(p, (context::PersonaBundle{"S", "M", "W"}));
    EXPECT_EQ(context::resolve_persona(a, a.default_workspace), p);
    auto text = p.serialize();
    auto soul = text.find("## Soul"), mem = text.find("## Memory Index"), ws = text.find("## Workspace Context");
    EXPECT_LT(soul, mem);
    EXPECT_LT(mem, ws);
    EXPECT_NE(ws, std::string::npos);

    std::filesystem::remove(a.soul_path());
    EXPECT_EQ(errc_of([&] { context::resolve_persona(a, a.default_workspace); }), Errc::invalid_state);
}

}  // namespace
}  // namespace semaclaw
