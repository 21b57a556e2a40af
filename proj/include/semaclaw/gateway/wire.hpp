#pragma once

#include <nlohmann/json.hpp>

#include "semaclaw/common/error.hpp"
#include "semaclaw/context/persona.hpp"
#include "semaclaw/extend/hooks.hpp"
#include "semaclaw/extend/skills.hpp"
#include "semaclaw/kernel/runtime.hpp"

namespace semaclaw::gateway {

nlohmann::json to_json(const context::AgentIdentity& a);
nlohmann::json to_json(const extend::SkillSummary& s);
nlohmann::json to_json(const extend::HookRegistration& h);
nlohmann::json to_json(const kernel::TurnResult& r, const std::string& session_id);

/// {"folder", "name", "channel"}; data_dir and workspace are optional.
context::AgentIdentity agent_from_json(const nlohmann::json& j);

int http_status(Errc code) noexcept;
/// {"error": {"code", "message"}}
nlohmann::json error_body(Errc code, const std::string& message);

}  // namespace semaclaw::gateway
