#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "semaclaw/common/clock.hpp"
#include "semaclaw/context/persona.hpp"
#include "semaclaw/context/registry.hpp"
#include "semaclaw/extend/hooks.hpp"
#include "semaclaw/extend/skills.hpp"
#include "semaclaw/extend/tools.hpp"
#include "semaclaw/kernel/adapter.hpp"
#include "semaclaw/kernel/events.hpp"
#include "semaclaw/kernel/ledger.hpp"
#include "semaclaw/memory/memory_store.hpp"
#include "semaclaw/permbridge/bridge.hpp"

namespace semaclaw::kernel {

struct SessionConfig {
    std::string agent_id;  // agent folder
    std::size_t context_limit = 32768;
    std::string model_adapter_id = "default";
    Duration idle_timeout = std::chrono::minutes{30};
    bool todo_enabled = true;
    int max_steps = 32;
    int step_retries = 2;  // extra attempts after an adapter failure
    std::optional<std::filesystem::path> workspace;  // defaults to the agent's default_workspace

    /// Throws Errc::validation.
    void validate() const;
};

enum class CompactionMode { summarized, truncation_fallback };

std::string_view to_string(CompactionMode m) noexcept;

struct CompactionReport {
    std::size_t tokens_before = 0;
    std::size_t tokens_after = 0;
    double ratio = 0.0;
    CompactionMode mode = CompactionMode::summarized;
    std::string summary_text;
};

nlohmann::json to_json(const CompactionReport& r);

struct TurnResult {
    bool ok = true;
    std::string reply;
    std::string error;
    std::vector<RuntimeEvent> events;  // this turn's events, in emission order
};

using AdapterFactory =
    std::function<std::shared_ptr<ModelAdapter>(const SessionConfig&, const context::AgentIdentity&)>;

struct RuntimeDeps {
    Clock* clock = nullptr;
    EventBus* bus = nullptr;
    context::AgentRegistry* agents = nullptr;
    memory::MemoryHub* memory = nullptr;
    extend::ToolRegistry* tools = nullptr;
    extend::HookRegistry* hooks = nullptr;
    extend::SkillRegistry* skills = nullptr;            // optional
    permbridge::PermissionBridge* bridge = nullptr;     // optional; external tools are denied without it
    AdapterFactory adapters;
};

inline constexpr const char* kTodoHeading = "## Todos";
inline constexpr const char* kSkillsHeading = "## Skills";

/// Per-session reason/act loop with token accounting and inline compaction.
/// Turns within a session are serialized; distinct sessions run concurrently.
class AgentRuntime {
public:
    explicit AgentRuntime(RuntimeDeps deps);
    ~AgentRuntime();
    AgentRuntime(const AgentRuntime&) = delete;
    AgentRuntime& operator=(const AgentRuntime&) = delete;

    /// ask_user, todo_write, workspace_switch, workspace_info, skill_load.
    void register_builtin_tools();

    std::string open_session(SessionConfig config);
    void close_session(const std::string& session_id);

    TurnResult submit_turn(const std::string& session_id, const std::string& user_message);

    /// Errors: invalid_state when the ledger is empty or below the trigger.
    CompactionReport compact(const std::string& session_id);

    /// Errors: not_found when the path is not an existing directory.
    context::PersonaBundle switch_workspace(const std::string& session_id, const std::filesystem::path& path);

    context::PersonaBundle persona(const std::string& session_id) const;
    /// The context the next adapter step would see.
    ModelContext assemble_context(const std::string& session_id) const;

    std::filesystem::path workspace(const std::string& session_id) const;
    std::vector<Message> messages(const std::string& session_id) const;
    std::size_t token_count(const std::string& session_id) const;
    std::size_t compaction_count(const std::string& session_id) const;
    std::vector<std::string> todos(const std::string& session_id) const;
    const SessionConfig& config(const std::string& session_id) const;
    std::string agent_of(const std::string& session_id) const;

    TimePoint last_activity(const std::string& session_id) const;
    bool is_open(const std::string& session_id) const;
    std::vector<std::string> sessions() const;
    std::vector<std::string> sessions_for(const std::string& agent_folder) const;

    void touch(const std::string& session_id);
    /// Refreshes every session of the agent; unknown agents are a no-op.
    void touch_agent(const std::string& agent_folder);

    /// Closes sessions idle past their timeout. Sessions suspended on the
    /// permission bridge are never reaped; long tool calls stay alive through
    /// touch / touch_agent heartbeats.
    std::vector<std::string> reap_idle();

private:
    struct Session;

    std::shared_ptr<Session> get(const std::string& session_id) const;
    void emit(Session& s, EventKind kind, nlohmann::json payload);
    void compact_locked(Session& s, CompactionReport* out);
    void append_checked(Session& s, Message m);
    Message build_reminder(const Session& s) const;
    ModelContext assemble_locked(const Session& s) const;
    void mark_suspended(const std::string& session_id, bool suspended);

    RuntimeDeps deps_;
    mutable std::mutex mu_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::atomic<std::uint64_t> next_session_{1};
};

}  // namespace semaclaw::kernel
