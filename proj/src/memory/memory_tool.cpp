#include "semaclaw/memory/memory_tool.hpp"

#include "semaclaw/common/error.hpp"

namespace semaclaw::memory {

nlohmann::json to_json(const MemoryRecord& r) {
    nlohmann::json j{{"doc_id", r.doc_id},
                     {"source", to_string(r.source)},
                     {"file", r.file},
                     {"date", r.date ? nlohmann::json(*r.date) : nlohmann::json(nullptr)},
                     {"chunk", r.chunk},
                     {"fts_score", r.fts_score ? nlohmann::json(*r.fts_score) : nlohmann::json(nullptr)},
                     {"vec_score", r.vec_score ? nlohmann::json(*r.vec_score) : nlohmann::json(nullptr)},
                     {"merged_score", r.merged_score}};
    return j;
}

nlohmann::json to_json(const SearchResult& r) {
    nlohmann::json records = nlohmann::json::array();
    for (const auto& rec : r.records) records.push_back(to_json(rec));
    return {{"level", static_cast<int>(r.level)}, {"records", records}};
}

void register_memory_tool(extend::ToolRegistry& tools, MemoryHub& hub, const context::AgentRegistry& agents) {
    using extend::ArgField;
    using extend::ArgType;
    tools.register_builtin(extend::ToolSpec{
        "memory_search",
        "Search this agent's long-term memory (MEMORY.md and daily logs).",
        {{ArgField{"query", ArgType::string, true, "search text"},
          ArgField{"k", ArgType::integer, false, "max results, 1..100"},
          ArgField{"source", ArgType::string, false, "memory, session or all"}}},
        [&hub, &agents](const extend::ToolCallContext& ctx, const nlohmann::json& args) -> std::string {
            auto identity = agents.find_folder(ctx.agent_folder);
            if (!identity) fail(Errc::not_found, "no agent with folder '" + ctx.agent_folder + "'");
            auto& store = hub.store_for(*identity);
            store.index_sync();
            RetrievalQuery q;
            q.text = args.at("query").get<std::string>();
            q.k = args.value("k", 10);
            q.source_filter = source_filter_from_string(args.value("source", "all"));
            return to_json(store.hybrid_search(q)).dump();
        },
        {nlohmann::json{{"query", "deadline"}, {"k", 5}, {"source", "memory"}}},
        {}});
}

}  // namespace semaclaw::memory
