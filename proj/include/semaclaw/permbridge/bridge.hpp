#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <future>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "semaclaw/common/clock.hpp"

namespace semaclaw::permbridge {

enum class RequestKind { tool_permission, user_question };

std::string_view to_string(RequestKind k) noexcept;

struct PendingRequest {
    std::string request_id;
    RequestKind kind = RequestKind::tool_permission;
    std::string session_id;
    std::string agent_folder;
    // tool_permission
    std::string tool_name;
    nlohmann::json args = nlohmann::json::object();
    std::string rationale;
    // user_question
    std::string question;
    TimePoint created_at{};
};

nlohmann::json to_json(const PendingRequest& r);

struct Decision {
    enum class Variant { approve, deny, modify, answer };

    Variant variant = Variant::deny;
    nlohmann::json new_args;  // modify
    std::string text;         // answer text, or the reason for a deny

    static Decision approve() { return {Variant::approve, nullptr, {}}; }
    static Decision deny(std::string reason = {}) { return {Variant::deny, nullptr, std::move(reason)}; }
    static Decision modify(nlohmann::json args) { return {Variant::modify, std::move(args), {}}; }
    static Decision answer(std::string text) { return {Variant::answer, nullptr, std::move(text)}; }

    bool operator==(const Decision&) const = default;
};

std::string_view to_string(Decision::Variant v) noexcept;
/// {"decision": "approve"|"deny"|"modify"|"answer", "args": {...}, "text": "..."}
Decision decision_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Decision& d);

struct SessionRef {
    std::string session_id;
    std::string agent_folder;
};

/// Process-wide human-in-the-loop gate. Callers block in
/// request_tool_permission / ask_user until some surface calls resolve() with
/// their request id. Only one instance may exist at a time.
class PermissionBridge {
public:
    using Surface = std::function<void(const PendingRequest&)>;
    /// Called with (session_id, suspended) when a session enters or leaves a
    /// suspension; the runtime uses it to keep the session's activity fresh.
    using ActivityHook = std::function<void(const std::string& session_id, bool suspended)>;

    explicit PermissionBridge(Clock& clock);
    ~PermissionBridge();
    PermissionBridge(const PermissionBridge&) = delete;
    PermissionBridge& operator=(const PermissionBridge&) = delete;

    /// Surfaces are notified of every new request. Returns an id for removal.
    std::uint64_t add_surface(Surface surface);
    void remove_surface(std::uint64_t id);
    void set_activity_hook(ActivityHook hook);

    Decision request_tool_permission(const SessionRef& session, const std::string& tool,
                                     const nlohmann::json& args, const std::string& rationale);
    std::string ask_user(const SessionRef& session, const std::string& question);

    /// Non-blocking halves of the two calls above.
    std::pair<std::string, std::future<Decision>> submit_tool_permission(
        const SessionRef& session, const std::string& tool, const nlohmann::json& args,
        const std::string& rationale);
    std::pair<std::string, std::future<Decision>> submit_question(const SessionRef& session,
                                                                  const std::string& question);

    /// Ordered by creation.
    std::vector<PendingRequest> list_pending() const;

    /// Errors: not_found, already_resolved, invalid_variant.
    void resolve(const std::string& request_id, const Decision& decision);

    std::size_t pending_for(const std::string& session_id) const;
    std::uint64_t resolutions() const noexcept { return resolutions_; }

private:
    struct Slot {
        PendingRequest request;
        std::promise<Decision> promise;
        std::uint64_t order = 0;
    };

    std::pair<std::string, std::future<Decision>> enqueue(PendingRequest request);

    Clock& clock_;
    mutable std::mutex mu_;
    std::map<std::string, Slot> pending_;
    std::set<std::string> resolved_;
    std::map<std::uint64_t, Surface> surfaces_;
    std::uint64_t next_surface_ = 1;
    std::uint64_t next_order_ = 1;
    ActivityHook activity_;
    std::atomic<std::uint64_t> resolutions_{0};
};

}  // namespace semaclaw::permbridge
