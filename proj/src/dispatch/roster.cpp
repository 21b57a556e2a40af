#include "semaclaw/dispatch/roster.hpp"

#include "semaclaw/common/error.hpp"
#include "semaclaw/common/text.hpp"

namespace semaclaw::dispatch {

nlohmann::json to_json(const RosterEntry& e) {
    return {{"name", e.name}, {"folder", e.folder}, {"channel", e.channel}};
}

std::vector<RosterEntry> list_agents(const context::AgentRegistry& registry) {
    std::vector<RosterEntry> out;
    for (const auto& a : registry.all()) out.push_back({a.name, a.folder, a.channel});
    return out;
}

context::AgentIdentity resolve_agent(const std::vector<context::AgentIdentity>& agents,
                                     const std::string& name_or_folder) {
    if (name_or_folder.empty()) fail(Errc::not_found, "no agent matches an empty name");
    const auto want = text::to_lower(name_or_folder);
    std::vector<const context::AgentIdentity*> hits;
    for (const auto& a : agents) {
        if (text::to_lower(a.name) == want || text::to_lower(a.folder) == want) hits.push_back(&a);
    }
    if (hits.empty()) fail(Errc::not_found, "no agent named '" + name_or_folder + "'");
    if (hits.size() > 1) {
        std::string list;
        for (const auto* a : hits) list += (list.empty() ? "" : ", ") + a->folder + " (name " + a->name + ")";
        fail(Errc::ambiguity, "'" + name_or_folder + "' matches several agents: " + list);
    }
    return *hits.front();
}

context::AgentIdentity resolve_agent(const context::AgentRegistry& registry, const std::string& name_or_folder) {
    return resolve_agent(registry.all(), name_or_folder);
}

}  // namespace semaclaw::dispatch
