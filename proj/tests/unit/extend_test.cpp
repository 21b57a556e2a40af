#include <gtest/gtest.h>

#include <thread>

#include "semaclaw/common/clock.hpp"
#include "semaclaw/extend/hooks.hpp"
#include "semaclaw/extend/invoker.hpp"
#include "semaclaw/extend/schema.hpp"
#include "semaclaw/extend/skills.hpp"
#include "semaclaw/extend/tools.hpp"
#include "test_support.hpp"

namespace semaclaw {
namespace {

using namespace extend;
using nlohmann::json;
using testing::errc_of;
using testing::TempDir;

ArgSchema url_schema() {
    return ArgSchema{{{"url", ArgType::string, true, ""}, {"n", ArgType::integer, false, ""}}};
}

ToolSpec echo_tool(const std::string& name) {
    return {name, "echo", url_schema(), [](const ToolCallContext&, const json& a) { return a.dump(); }};
}

TEST(Schema, ValidatesTypesRequiredAndUnknown) {
    auto s = url_schema();
    EXPECT_FALSE(s.validate({{"url", "x"}}));
    EXPECT_FALSE(s.validate({{"url", "x"}, {"n", 3}}));
    EXPECT_TRUE(s.validate(json::object()));
    EXPECT_TRUE(s.validate({{"url", 1}}));
    EXPECT_TRUE(s.validate({{"url", "x"}, {"n", 1.5}}));
    EXPECT_TRUE(s.validate({{"url", "x"}, {"extra", 1}}));
    EXPECT_TRUE(s.validate(json::array()));
    auto back = ArgSchema::from_json(s.to_json());
    ASSERT_EQ(back.fields.size(), 2u);
    EXPECT_EQ(back.fields[1].type, ArgType::integer);
    EXPECT_TRUE(back.fields[0].required);
}

TEST(Tools, ExamplesMustValidate) {
    ToolRegistry r;
    auto spec = echo_tool("fetch");
    spec.examples = {{{"nope", 1}}};
    EXPECT_EQ(errc_of([&] { r.install(spec); }), Errc::validation);
    spec.examples = {{{"url", "a"}}};
    r.install(spec);
    EXPECT_EQ(errc_of([&] { r.install(spec); }), Errc::validation);
    EXPECT_EQ(r.find("fetch")->tier, Tier::external);
}

TEST(Tools, CommandToolsRunThroughTheShell) {
    TempDir d;
    testing::write(d / "tools/up.json",
                   R"({"name":"upper","description":"d","schema":{"fields":[{"name":"s","type":"string","required":true}]},)"
                   R"("command":"tr a-z A-Z"})");
    testing::write(d / "tools/bad.json",
                   R"({"name":"bad","description":"d","schema":{"fields":[]},"command":"exit 4"})");
    auto tools = load_command_tools(d / "tools");
    ASSERT_EQ(tools.size(), 2u);
    ToolRegistry r;
    for (auto& t : tools) r.install(t);
    auto up = r.find("upper");
    EXPECT_EQ(up->handler({}, {{"s", "abc"}}), R"({"S":"ABC"})");
    EXPECT_THROW(r.find("bad")->handler({}, json::object()), std::exception);
    testing::write(d / "broken/x.json", "{not json");
    EXPECT_EQ(errc_of([&] { load_command_tools(d / "broken"); }), Errc::config);
}

TEST(Hooks, RunInOrderAndModifyThreadsThePayload) {
    HookRegistry h;
    std::vector<std::string> seen;
    h.register_hook({"b", HookEvent::tool_pre, HookCapability::modify, 1, {},
                     [](json& p) { p["args"]["n"] = p["args"]["n"].get<int>() * 10; }, {}, std::nullopt});
    h.register_hook({"a", HookEvent::tool_pre, HookCapability::modify, 1, {},
                     [](json& p) { p["args"]["n"] = p["args"]["n"].get<int>() + 1; }, {}, std::nullopt});
    h.register_hook({"z", HookEvent::tool_pre, HookCapability::observe, 0,
                     [&](const json& p) { seen.push_back(p.dump()); }, {}, {}, std::nullopt});
    h.register_hook({"other", HookEvent::tool_post, HookCapability::observe, 0,
                     [&](const json&) { seen.push_back("post"); }, {}, {}, std::nullopt});
    auto out = h.fire(HookEvent::tool_pre, {{"args", {{"n", 1}}}});
    EXPECT_EQ(out.ran, (std::vector<std::string>{"z", "a", "b"}));
    EXPECT_EQ(out.payload["args"]["n"], 20);
    EXPECT_EQ(seen.size(), 1u);
    EXPECT_EQ(errc_of([&] {
                  h.register_hook({"a", HookEvent::tool_pre, HookCapability::observe, 0,
                                   [](const json&) {}, {}, {}, std::nullopt});
              }),
              Errc::validation);
    EXPECT_EQ(errc_of([&] {
                  h.register_hook({"x", HookEvent::tool_pre, HookCapability::block, 0,
                                   [](const json&) {}, {}, {}, std::nullopt});
              }),
              Errc::validation);
    EXPECT_TRUE(h.unregister_hook("a"));
    EXPECT_FALSE(h.unregister_hook("a"));
}

TEST(Hooks, ObserversCannotMutate) {
    HookRegistry h;
    h.register_hook({"o", HookEvent::task_start, HookCapability::observe, 0,
                     [](const json& p) { const_cast<json&>(p)["x"] = 2; }, {}, {}, std::nullopt});
    EXPECT_EQ(h.fire(HookEvent::task_start, {{"x", 1}}).payload["x"], 1);
}

TEST(Hooks, BlockStopsTheChain) {
    HookRegistry h;
    h.register_hook({"1", HookEvent::tool_pre, HookCapability::block, 0, {}, {},
                     [](const json& p) { return p["tool"] == "rm" ? Verdict::block : Verdict::proceed; },
                     std::nullopt});
    h.register_hook({"2", HookEvent::tool_pre, HookCapability::observe, 5, [](const json&) {}, {}, {},
                     std::nullopt});
    auto blocked = h.fire(HookEvent::tool_pre, {{"tool", "rm"}});
    EXPECT_EQ(blocked.verdict, Verdict::block);
    EXPECT_EQ(blocked.ran, std::vector<std::string>{"1"});
    EXPECT_EQ(h.fire(HookEvent::tool_pre, {{"tool", "ls"}}).ran.size(), 2u);
}

TEST(Hooks, EventNamesRoundTrip) {
    for (auto e : {HookEvent::task_start, HookEvent::tool_pre, HookEvent::tool_post, HookEvent::permission_request,
                   HookEvent::compact_exec, HookEvent::task_done, HookEvent::error}) {
        EXPECT_EQ(hook_event_from_string(to_string(e)), e);
    }
    EXPECT_EQ(to_string(HookEvent::permission_request), "permission:request");
    EXPECT_EQ(errc_of([] { hook_event_from_string("tool:mid"); }), Errc::validation);
}

TEST(Hooks, CommandHooksBlockAndModify) {
    TempDir d;
    testing::write(d / "hooks/1.json",
                   R"({"hook_id":"deny-rm","event":"tool:pre","capability":"block","order":0,)"
                   R"("command":"grep -q '\"tool\":\"rm\"' && exit 3; exit 0"})");
    testing::write(d / "hooks/2.json",
                   R"({"hook_id":"stamp","event":"tool:pre","capability":"modify","order":1,)"
                   R"("command":"echo '{\"tool\":\"ls\",\"stamped\":true}'"})");
    HookRegistry h;
    for (auto& r : load_command_hooks(d / "hooks")) h.register_hook(r);
    auto blocked = h.fire(HookEvent::tool_pre, {{"tool", "rm"}});
    EXPECT_EQ(blocked.verdict, Verdict::block);
    auto ok = h.fire(HookEvent::tool_pre, {{"tool", "ls"}});
    EXPECT_EQ(ok.verdict, Verdict::proceed);
    EXPECT_EQ(ok.payload["stamped"], true);
}

TEST(Skills, ParseSectionsAndRoutes) {
    auto m = parse_skill("deploy", "---\nname: Deploy\ndescription: ship it\n---\nintro\n## Build\nroute: when compiling\n"
                                   "run make\n\n## Release\ntag it\n");
    EXPECT_EQ(m.name, "Deploy");
    ASSERT_EQ(m.sections.size(), 2u);
    EXPECT_EQ(m.sections[0].route, "when compiling");
    EXPECT_EQ(m.sections[0].content, "run make");
    EXPECT_EQ(m.sections[1].content, "tag it");
    EXPECT_EQ(errc_of([] { parse_skill("x", "---\ndescription: d\n---\n"); }), Errc::validation);
    EXPECT_EQ(errc_of([] { parse_skill("x", "---\nname: n\n---\n## A\n## A\n"); }), Errc::validation);
}

TEST(Skills, ActivationGatesContextAndLoading) {
    TempDir d;
    testing::write(d / "skills/deploy/SKILL.md", "---\nname: Deploy\ndescription: ship it\n---\n## Build\nmake\n");
    testing::write(d / "skills/review/SKILL.md", "---\nname: Review\ndescription: read diffs\n---\n## Diff\nlook\n");
    SkillRegistry r(d / "skills", d / "skills.json");
    auto all = r.list_skills();
    ASSERT_EQ(all.size(), 2u);
    EXPECT_FALSE(all[0].active);
    EXPECT_EQ(r.context_block(), "");
    EXPECT_EQ(errc_of([&] { r.load_skill_section("deploy", "Build"); }), Errc::invalid_state);

    r.set_skill_active("deploy", true);
    EXPECT_NE(r.context_block().find("- Deploy: ship it"), std::string::npos);
    EXPECT_EQ(r.context_block().find("Review"), std::string::npos);
    EXPECT_EQ(r.load_skill_section("deploy", "Build"), "make");
    EXPECT_EQ(errc_of([&] { r.load_skill_section("deploy", "Nope"); }), Errc::not_found);
    EXPECT_EQ(errc_of([&] { r.set_skill_active("ghost", true); }), Errc::not_found);

    // a second registry over the same files sees the toggle
    SkillRegistry other(d / "skills", d / "skills.json");
    other.set_skill_active("deploy", false);
    EXPECT_EQ(r.context_block(), "");
}

struct InvokerFixture : ::testing::Test {
    FakeClock clock;
    permbridge::PermissionBridge bridge{clock};
    ToolRegistry tools;
    HookRegistry hooks;
    ToolInvoker invoker{tools, hooks, &bridge};
    ToolCallContext ctx{"s1", "alpha", {}};

    void SetUp() override {
        tools.install(echo_tool("fetch"));
        tools.register_builtin(echo_tool("memory_search"));
        tools.install({"boom", "", {}, [](const ToolCallContext&, const json&) -> std::string {
                           throw std::runtime_error("kaput");
                       }});
    }

    ToolResult invoke_resolving(const std::string& tool, const json& args, const permbridge::Decision& d) {
        ToolResult out;
        std::thread t([&] { out = invoker.invoke(ctx, tool, args); });
        while (bridge.list_pending().empty()) std::this_thread::sleep_for(std::chrono::milliseconds(1));
        bridge.resolve(bridge.list_pending()[0].request_id, d);
        t.join();
        return out;
    }
};

TEST_F(InvokerFixture, InternalToolsSkipTheBridge) {
    auto r = invoker.invoke(ctx, "memory_search", {{"url", "x"}});
    EXPECT_EQ(r.status, ToolStatus::ok);
    EXPECT_FALSE(r.gated);
    EXPECT_EQ(bridge.resolutions(), 0u);
}

TEST_F(InvokerFixture, ExternalToolsWaitForADecision) {
    auto ok = invoke_resolving("fetch", {{"url", "x"}}, permbridge::Decision::approve());
    EXPECT_EQ(ok.status, ToolStatus::ok);
    EXPECT_TRUE(ok.gated);
    auto denied = invoke_resolving("fetch", {{"url", "x"}}, permbridge::Decision::deny("nope"));
    EXPECT_EQ(denied.status, ToolStatus::denied);
    EXPECT_NE(denied.text.find("nope"), std::string::npos);
    auto modified = invoke_resolving("fetch", {{"url", "x"}}, permbridge::Decision::modify({{"url", "y"}}));
    EXPECT_EQ(modified.status, ToolStatus::ok);
    EXPECT_EQ(modified.text, R"({"url":"y"})");
    auto bad = invoke_resolving("fetch", {{"url", "x"}}, permbridge::Decision::modify({{"zzz", 1}}));
    EXPECT_EQ(bad.status, ToolStatus::denied);
}

TEST_F(InvokerFixture, FailuresBecomeStatuses) {
    EXPECT_EQ(invoker.invoke(ctx, "ghost", json::object()).status, ToolStatus::unknown_tool);
    EXPECT_EQ(invoker.invoke(ctx, "memory_search", {{"url", 3}}).status, ToolStatus::invalid_args);
    EXPECT_EQ(bridge.resolutions(), 0u);
    auto boom = invoke_resolving("boom", json::object(), permbridge::Decision::approve());
    EXPECT_EQ(boom.status, ToolStatus::error);
    EXPECT_NE(boom.text.find("kaput"), std::string::npos);
}

TEST_F(InvokerFixture, PreHookBlocksBeforeTheBridge) {
    hooks.register_hook({"b", HookEvent::tool_pre, HookCapability::block, 0, {}, {},
                         [](const json&) { return Verdict::block; }, std::nullopt});
    auto r = invoker.invoke(ctx, "fetch", {{"url", "x"}});
    EXPECT_EQ(r.status, ToolStatus::blocked);
    EXPECT_TRUE(bridge.list_pending().empty());
}

TEST_F(InvokerFixture, PermissionHookCanDecide) {
    hooks.register_hook({"auto", HookEvent::permission_request, HookCapability::modify, 0, {},
                         [](json& p) { p["decision"] = "approve"; }, {}, std::nullopt});
    auto r = invoker.invoke(ctx, "fetch", {{"url", "x"}});
    EXPECT_EQ(r.status, ToolStatus::ok);
    EXPECT_TRUE(r.gated);
    EXPECT_EQ(bridge.resolutions(), 0u);
}

TEST_F(InvokerFixture, PostHookRewritesResultAndEventsBracketTheCall) {
    hooks.register_hook({"redact", HookEvent::tool_post, HookCapability::modify, 0, {},
                         [](json& p) { p["result"] = "[redacted]"; }, {}, std::nullopt});
    std::vector<bool> phases;
    auto r = invoker.invoke(ctx, "memory_search", {{"url", "x"}}, "", [&](bool pre, const json&) {
        phases.push_back(pre);
    });
    EXPECT_EQ(r.text, "[redacted]");
    EXPECT_EQ(phases, (std::vector<bool>{true, false}));
}

TEST(Invoker, NoBridgeMeansDeny) {
    ToolRegistry tools;
    HookRegistry hooks;
    tools.install(echo_tool("fetch"));
    ToolInvoker inv(tools, hooks, nullptr);
    EXPECT_EQ(inv.invoke({"s", "a", {}}, "fetch", {{"url", "x"}}).status, ToolStatus::denied);
}

}  // namespace
}  // namespace semaclaw
