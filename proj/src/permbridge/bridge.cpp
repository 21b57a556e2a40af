#include "semaclaw/permbridge/bridge.hpp"

#include <algorithm>

#include "semaclaw/common/error.hpp"

namespace semaclaw::permbridge {

namespace {

std::atomic<bool> g_instance_alive{false};
std::atomic<std::uint64_t> g_next_request{1};

}  // namespace

std::string_view to_string(RequestKind k) noexcept {
    return k == RequestKind::tool_permission ? "tool_permission" : "user_question";
}

std::string_view to_string(Decision::Variant v) noexcept {
    switch (v) {
        case Decision::Variant::approve: return "approve";
        case Decision::Variant::deny: return "deny";
        case Decision::Variant::modify: return "modify";
        case Decision::Variant::answer: return "answer";
    }
    return "deny";
}

nlohmann::json to_json(const PendingRequest& r) {
    nlohmann::json j{{"request_id", r.request_id},
                     {"kind", to_string(r.kind)},
                     {"session_id", r.session_id},
                     {"agent", r.agent_folder},
                     {"created_at_ms", to_epoch_ms(r.created_at)}};
    if (r.kind == RequestKind::tool_permission) {
        j["tool"] = r.tool_name;
        j["args"] = r.args;
        j["rationale"] = r.rationale;
    } else {
        j["question"] = r.question;
    }
    return j;
}

Decision decision_from_json(const nlohmann::json& j) {
    auto kind = j.value("decision", "");
    if (kind == "approve") return Decision::approve();
    if (kind == "deny") return Decision::deny(j.value("text", j.value("reason", "")));
    if (kind == "modify") {
        if (!j.contains("args") || !j["args"].is_object()) {
            fail(Errc::argument, "modify decision needs an \"args\" object");
        }
        return Decision::modify(j["args"]);
    }
    if (kind == "answer") return Decision::answer(j.value("text", ""));
    fail(Errc::argument, "decision must be approve, deny, modify or answer");
}

nlohmann::json to_json(const Decision& d) {
    nlohmann::json j{{"decision", to_string(d.variant)}};
    if (d.variant == Decision::Variant::modify) j["args"] = d.new_args;
    if (!d.text.empty()) j["text"] = d.text;
    return j;
}

PermissionBridge::PermissionBridge(Clock& clock) : clock_(clock) {
    if (g_instance_alive.exchange(true)) {
        fail(Errc::config, "a PermissionBridge already exists in this process");
    }
}

PermissionBridge::~PermissionBridge() {
    std::map<std::string, Slot> orphans;
    {
        std::lock_guard lock(mu_);
        orphans.swap(pending_);
    }
    for (auto& [id, slot] : orphans) {
        slot.promise.set_value(Decision::deny("approval bridge shut down"));
    }
    g_instance_alive = false;
}

std::uint64_t PermissionBridge::add_surface(Surface surface) {
    std::lock_guard lock(mu_);
    auto id = next_surface_++;
    surfaces_[id] = std::move(surface);
    return id;
}

void PermissionBridge::remove_surface(std::uint64_t id) {
    std::lock_guard lock(mu_);
    surfaces_.erase(id);
}

void PermissionBridge::set_activity_hook(ActivityHook hook) {
    std::lock_guard lock(mu_);
    activity_ = std::move(hook);
}

std::pair<std::string, std::future<Decision>> PermissionBridge::enqueue(PendingRequest request) {
    request.request_id = "req-" + std::to_string(g_next_request++);
    request.created_at = clock_.now();
    std::future<Decision> future;
    std::vector<Surface> surfaces;
    ActivityHook activity;
    {
        std::lock_guard lock(mu_);
        Slot slot{request, {}, next_order_++};
        future = slot.promise.get_future();
        pending_.emplace(request.request_id, std::move(slot));
        for (const auto& [id, s] : surfaces_) surfaces.push_back(s);
        activity = activity_;
    }
    if (activity) activity(request.session_id, true);
    for (const auto& s : surfaces) s(request);
    return {request.request_id, std::move(future)};
}

std::pair<std::string, std::future<Decision>> PermissionBridge::submit_tool_permission(
    const SessionRef& session, const std::string& tool, const nlohmann::json& args,
    const std::string& rationale) {
    PendingRequest r;
    r.kind = RequestKind::tool_permission;
    r.session_id = session.session_id;
    r.agent_folder = session.agent_folder;
    r.tool_name = tool;
    r.args = args;
    r.rationale = rationale;
    return enqueue(std::move(r));
}

std::pair<std::string, std::future<Decision>> PermissionBridge::submit_question(
    const SessionRef& session, const std::string& question) {
    PendingRequest r;
    r.kind = RequestKind::user_question;
    r.session_id = session.session_id;
    r.agent_folder = session.agent_folder;
    r.question = question;
    return enqueue(std::move(r));
}

Decision PermissionBridge::request_tool_permission(const SessionRef& session, const std::string& tool,
                                                   const nlohmann::json& args,
                                                   const std::string& rationale) {
    auto [id, future] = submit_tool_permission(session, tool, args, rationale);
    return future.get();
}

std::string PermissionBridge::ask_user(const SessionRef& session, const std::string& question) {
    auto [id, future] = submit_question(session, question);
    auto d = future.get();
    if (d.variant == Decision::Variant::deny) {
        return "The user declined to answer." + (d.text.empty() ? std::string() : " " + d.text);
    }
    return d.text;
}

std::vector<PendingRequest> PermissionBridge::list_pending() const {
    std::vector<std::pair<std::uint64_t, PendingRequest>> ordered;
    {
        std::lock_guard lock(mu_);
        for (const auto& [id, slot] : pending_) ordered.emplace_back(slot.order, slot.request);
    }
    std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<PendingRequest> out;
    for (auto& [order, r] : ordered) out.push_back(std::move(r));
    return out;
}

void PermissionBridge::resolve(const std::string& request_id, const Decision& decision) {
    Slot slot;
    ActivityHook activity;
    {
        std::lock_guard lock(mu_);
        auto it = pending_.find(request_id);
        if (it == pending_.end()) {
            if (resolved_.count(request_id)) {
                fail(Errc::already_resolved, "request " + request_id + " was already resolved");
            }
            fail(Errc::not_found, "no pending request " + request_id);
        }
        const bool is_tool = it->second.request.kind == RequestKind::tool_permission;
        const auto v = decision.variant;
        if (is_tool && v == Decision::Variant::answer) {
            fail(Errc::invalid_variant, "answer is only valid for user questions");
        }
        if (!is_tool && v != Decision::Variant::answer && v != Decision::Variant::deny) {
            fail(Errc::invalid_variant, "a user question can only be answered or denied");
        }
        slot = std::move(it->second);
        pending_.erase(it);
        resolved_.insert(request_id);
        activity = activity_;
    }
    ++resolutions_;
    if (activity) activity(slot.request.session_id, false);
    slot.promise.set_value(decision);
}

std::size_t PermissionBridge::pending_for(const std::string& session_id) const {
    std::lock_guard lock(mu_);
    return static_cast<std::size_t>(std::count_if(pending_.begin(), pending_.end(), [&](const auto& kv) {
        return kv.second.request.session_id == session_id;
    }));
}

}  // namespace semaclaw::permbridge
