#include "semaclaw/gateway/wire.hpp"

namespace semaclaw::gateway {

using nlohmann::json;

json to_json(const context::AgentIdentity& a) {
    return {{"folder", a.folder},
            {"name", a.name},
            {"channel", a.channel},
            {"data_dir", a.data_dir.string()},
            {"default_workspace", a.default_workspace.string()}};
}

json to_json(const extend::SkillSummary& s) {
    return {{"skill_id", s.skill_id}, {"name", s.name}, {"description", s.description}, {"active", s.active}};
}

json to_json(const extend::HookRegistration& h) {
    json j{{"hook_id", h.hook_id},
           {"event", extend::to_string(h.event)},
           {"capability", extend::to_string(h.capability)},
           {"order", h.order}};
    j["command"] = h.command ? json(*h.command) : json(nullptr);
    return j;
}

json to_json(const kernel::TurnResult& r, const std::string& session_id) {
    json events = json::array();
    for (const auto& ev : r.events) events.push_back(kernel::to_json(ev));
    return {{"ok", r.ok}, {"reply", r.reply}, {"error", r.error}, {"session_id", session_id}, {"events", events}};
}

context::AgentIdentity agent_from_json(const json& j) {
    context::AgentIdentity a;
    try {
        a.folder = j.at("folder").get<std::string>();
        a.name = j.value("name", a.folder);
        a.channel = j.value("channel", std::string("cli"));
        if (j.contains("data_dir")) a.data_dir = j.at("data_dir").get<std::string>();
        if (j.contains("default_workspace")) a.default_workspace = j.at("default_workspace").get<std::string>();
    } catch (const json::exception& e) {
        fail(Errc::validation, std::string("bad agent: ") + e.what());
    }
    return a;
}

int http_status(Errc code) noexcept {
    switch (code) {
        case Errc::not_found: return 404;
        case Errc::already_resolved:
        case Errc::invalid_state:
        case Errc::lock_contention: return 409;
        case Errc::validation:
        case Errc::argument:
        case Errc::invalid_variant:
        case Errc::ambiguity:
        case Errc::config: return 400;
        case Errc::wait_timeout: return 504;
        case Errc::adapter: return 502;
        case Errc::io: return 500;
    }
    return 500;
}

json error_body(Errc code, const std::string& message) {
    return {{"error", {{"code", to_string(code)}, {"message", message}}}};
}

}  // namespace semaclaw::gateway
