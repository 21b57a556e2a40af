#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace semaclaw::extend {

enum class HookEvent { task_start, tool_pre, tool_post, permission_request, compact_exec, task_done, error };

std::string_view to_string(HookEvent e) noexcept;
HookEvent hook_event_from_string(std::string_view s);

enum class HookCapability { observe, modify, block };

std::string_view to_string(HookCapability c) noexcept;
HookCapability hook_capability_from_string(std::string_view s);

enum class Verdict { proceed, block };

using ObserveHandler = std::function<void(const nlohmann::json& payload)>;
using ModifyHandler = std::function<void(nlohmann::json& payload)>;
using BlockHandler = std::function<Verdict(const nlohmann::json& payload)>;

/// One lifecycle callback. Exactly one handler matching `capability` is set,
/// or `command` names an external executable that receives the payload on
/// stdin and answers with its exit status (0 continue, 3 block) and, for
/// modify hooks, the new payload on stdout.
struct HookRegistration {
    std::string hook_id;
    HookEvent event = HookEvent::tool_pre;
    HookCapability capability = HookCapability::observe;
    int order = 0;
    ObserveHandler observe;
    ModifyHandler modify;
    BlockHandler block;
    std::optional<std::string> command;
};

struct HookOutcome {
    nlohmann::json payload;
    Verdict verdict = Verdict::proceed;
    std::vector<std::string> ran;  // hook ids, in execution order
};

inline constexpr int kExternalBlockExit = 3;

class HookRegistry {
public:
    void register_hook(HookRegistration reg);
    bool unregister_hook(const std::string& hook_id);
    std::vector<HookRegistration> list() const;

    /// Runs matching hooks ordered by (order, hook_id). Modify hooks thread the
    /// payload; the first block verdict stops the chain.
    HookOutcome fire(HookEvent event, nlohmann::json payload) const;

private:
    mutable std::mutex mu_;
    std::shared_ptr<const std::vector<HookRegistration>> hooks_ =
        std::make_shared<const std::vector<HookRegistration>>();
};

/// Loads external hooks from `dir/*.json`:
/// {"hook_id", "event", "capability", "order", "command"}.
std::vector<HookRegistration> load_command_hooks(const std::filesystem::path& dir);

}  // namespace semaclaw::extend
