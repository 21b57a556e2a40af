#pragma once

#include <filesystem>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "semaclaw/context/registry.hpp"
#include "semaclaw/dispatch/bridge.hpp"
#include "semaclaw/dispatch/dispatch_tools.hpp"
#include "semaclaw/extend/hooks.hpp"
#include "semaclaw/extend/skills.hpp"
#include "semaclaw/extend/tools.hpp"
#include "semaclaw/gateway/config.hpp"
#include "semaclaw/gateway/event_log.hpp"
#include "semaclaw/kernel/events.hpp"
#include "semaclaw/kernel/runtime.hpp"
#include "semaclaw/memory/memory_store.hpp"
#include "semaclaw/permbridge/bridge.hpp"
#include "semaclaw/schedtask/scheduler.hpp"
#include "semaclaw/wiki/wiki_store.hpp"

namespace semaclaw::gateway {

/// Builds an adapter from a binding string: "scripted:<program.json>" or an
/// http:// chat-completions url. Errors: config.
std::shared_ptr<kernel::ModelAdapter> make_adapter(const std::string& binding, const GatewayConfig& config);

/// The application layer: one instance of every module wired together for a
/// data root. Hosts each agent's primary session, runs dispatched work on
/// background threads, and feeds the HTTP event stream.
class Services final : public dispatch::WorkerPort, public schedtask::AgentPort, public schedtask::ChannelSink {
public:
    /// `executable` enables the subprocess form of the dispatch tools.
    /// `adapters` replaces the binding-based adapter factory (tests).
    Services(GatewayConfig config, Clock& clock, std::optional<std::filesystem::path> executable = std::nullopt,
             kernel::AdapterFactory adapters = {});
    ~Services() override;
    Services(const Services&) = delete;
    Services& operator=(const Services&) = delete;

    const GatewayConfig& config() const noexcept { return config_; }
    Clock& clock() noexcept { return clock_; }
    kernel::EventBus& bus() noexcept { return bus_; }
    context::AgentRegistry& agents() noexcept { return agents_; }
    memory::MemoryHub& memory() noexcept { return memory_; }
    extend::ToolRegistry& tools() noexcept { return tools_; }
    extend::HookRegistry& hooks() noexcept { return hooks_; }
    extend::SkillRegistry& skills() noexcept { return skills_; }
    permbridge::PermissionBridge& bridge() noexcept { return bridge_; }
    kernel::AgentRuntime& runtime() noexcept { return *runtime_; }
    wiki::WikiHub& wiki() noexcept { return wiki_; }
    dispatch::DispatchBridge& dispatcher() noexcept { return *dispatcher_; }
    schedtask::JobStore& jobs() noexcept { return jobs_; }
    schedtask::Scheduler& scheduler() noexcept { return *scheduler_; }
    EventLog& events() noexcept { return events_; }

    /// The agent's long-lived session, reopened if it was reaped.
    /// Errors: not_found for unknown agents.
    std::string primary_session(const std::string& folder);
    kernel::TurnResult run_agent_turn(const std::string& folder, const std::string& text);

    /// Resolves through the bridge and records the resolution in the event log.
    void resolve(const std::string& request_id, const permbridge::Decision& decision);

    /// Denies every outstanding request (shutdown).
    void deny_pending(const std::string& reason);

    /// Reaps idle sessions and applies log retention for every agent.
    void maintain();

    // dispatch::WorkerPort
    std::filesystem::path workspace(const std::string& folder) override;
    void set_workspace(const std::string& folder, const std::filesystem::path& path) override;
    void submit(const std::string& folder, const std::string& task_ref, const std::string& prompt) override;
    void heartbeat(const std::string& admin_folder) override;

    // schedtask::AgentPort
    std::string run_turn(const std::string& agent_folder, const std::string& prompt) override;

    // schedtask::ChannelSink: appends to outbox.ndjson and the event log.
    void deliver(const std::string& channel, const std::string& message, const std::string& origin) override;

    /// Waits for submitted worker turns to finish.
    void drain();

private:
    void prune_workers();

    GatewayConfig config_;
    Clock& clock_;
    kernel::EventBus bus_;
    EventLog events_;
    context::AgentRegistry agents_;
    memory::MemoryHub memory_;
    extend::ToolRegistry tools_;
    extend::HookRegistry hooks_;
    extend::SkillRegistry skills_;
    permbridge::PermissionBridge bridge_;
    std::unique_ptr<kernel::AgentRuntime> runtime_;
    wiki::WikiHub wiki_;
    dispatch::StateStore state_;
    std::unique_ptr<dispatch::DispatchBridge> dispatcher_;
    std::unique_ptr<dispatch::DispatchToolService> dispatch_tools_;
    schedtask::JobStore jobs_;
    std::unique_ptr<schedtask::Scheduler> scheduler_;
    kernel::EventBus::Subscription event_sub_;
    std::uint64_t surface_id_ = 0;

    std::mutex primary_mu_;
    std::map<std::string, std::string> primary_;
    std::mutex outbox_mu_;
    std::mutex workers_mu_;
    std::vector<std::future<void>> workers_;
};

}  // namespace semaclaw::gateway
