#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "semaclaw/context/registry.hpp"

namespace semaclaw::dispatch {

struct RosterEntry {
    std::string name;
    std::string folder;
    std::string channel;
};

nlohmann::json to_json(const RosterEntry& e);

/// Every registered identity, sorted by folder.
std::vector<RosterEntry> list_agents(const context::AgentRegistry& registry);

/// Case-insensitive exact match against names and folder ids. Errors:
/// not_found, ambiguity (the candidates are listed in the message).
context::AgentIdentity resolve_agent(const context::AgentRegistry& registry, const std::string& name_or_folder);
context::AgentIdentity resolve_agent(const std::vector<context::AgentIdentity>& agents,
                                     const std::string& name_or_folder);

}  // namespace semaclaw::dispatch
