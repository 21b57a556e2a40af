#pragma once

#include <nlohmann/json.hpp>

#include "semaclaw/context/registry.hpp"
#include "semaclaw/extend/tools.hpp"
#include "semaclaw/memory/memory_store.hpp"

namespace semaclaw::memory {

nlohmann::json to_json(const MemoryRecord& r);
nlohmann::json to_json(const SearchResult& r);

/// Registers memory_search {query, k, source}. The calling agent's index is
/// synced before each search, so only that agent's memory is visible.
void register_memory_tool(extend::ToolRegistry& tools, MemoryHub& hub, const context::AgentRegistry& agents);

}  // namespace semaclaw::memory
