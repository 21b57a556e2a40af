#include "semaclaw/wiki/wiki_tools.hpp"

namespace semaclaw::wiki {

namespace {

using extend::ArgField;
using extend::ArgType;
using extend::ToolCallContext;
using nlohmann::json;

std::vector<std::string> string_list(const json& args, const char* key) {
    std::vector<std::string> out;
    if (!args.contains(key)) return out;
    for (const auto& v : args.at(key)) out.push_back(v.get<std::string>());
    return out;
}

}  // namespace

void register_wiki_tools(extend::ToolRegistry& tools, WikiHub& hub) {
    tools.register_builtin(extend::ToolSpec{
        "wiki_tree",
        "List the wiki's categories and entries with their tags.",
        {},
        [&hub](const ToolCallContext& ctx, const json&) {
            return to_json(hub.store_for(ctx.agent_folder).inspect_tree()).dump();
        },
        {json::object()},
        {}});

    tools.register_builtin(extend::ToolSpec{
        "wiki_mkdir",
        "Create a wiki category (nested paths allowed).",
        {{ArgField{"path", ArgType::string, true, "category path relative to the wiki root"}}},
        [&hub](const ToolCallContext& ctx, const json& args) {
            return json{{"path", hub.store_for(ctx.agent_folder).create_category(args.at("path"))}}.dump();
        },
        {json{{"path", "projects/alpha"}}},
        {}});

    tools.register_builtin(extend::ToolSpec{
        "wiki_save",
        "Save a new wiki entry. Without a category it is staged in inbox/.",
        {{ArgField{"title", ArgType::string, true, "entry title, used for the file name"},
          ArgField{"body", ArgType::string, true, "Markdown body"},
          ArgField{"tags", ArgType::array, false, "list of tags"},
          ArgField{"category", ArgType::string, false, "target category"}}},
        [&hub](const ToolCallContext& ctx, const json& args) {
            std::optional<std::string> category;
            if (args.contains("category")) category = args.at("category").get<std::string>();
            auto path = hub.store_for(ctx.agent_folder)
                            .save_entry(args.at("title"), args.at("body"), string_list(args, "tags"), category);
            return json{{"path", path}}.dump();
        },
        {json{{"title", "Adam notes"}, {"body", "Use warmup."}, {"tags", {"optimizer"}}, {"category", "ml"}}},
        {}});

    tools.register_builtin(extend::ToolSpec{
        "wiki_organize",
        "Copy a file into a wiki category, adding tags and provenance without touching its body.",
        {{ArgField{"source", ArgType::string, true, "file path, absolute or relative to the wiki root"},
          ArgField{"category", ArgType::string, true, "target category"},
          ArgField{"tags", ArgType::array, false, "tags to merge"}}},
        [&hub](const ToolCallContext& ctx, const json& args) {
            auto path = hub.store_for(ctx.agent_folder)
                            .organize_file(args.at("source"), args.at("category"), string_list(args, "tags"));
            return json{{"path", path}}.dump();
        },
        {json{{"source", "inbox/adam-notes.md"}, {"category", "ml/optim"}, {"tags", {"adam"}}}},
        {}});

    tools.register_builtin(extend::ToolSpec{
        "wiki_search",
        "Search the wiki by content, by tags, or both. Never searches memory.",
        {{ArgField{"query", ArgType::string, false, "content query"},
          ArgField{"tags", ArgType::array, false, "entries must carry all of these tags"},
          ArgField{"k", ArgType::integer, false, "max results"}}},
        [&hub](const ToolCallContext& ctx, const json& args) {
            auto& store = hub.store_for(ctx.agent_folder);
            store.index_sync();
            std::optional<std::string> query;
            if (args.contains("query")) query = args.at("query").get<std::string>();
            std::optional<std::vector<std::string>> tags;
            if (args.contains("tags")) tags = string_list(args, "tags");
            json out = json::array();
            for (const auto& hit : store.search(query, tags, args.value("k", 10))) out.push_back(to_json(hit));
            return out.dump();
        },
        {json{{"query", "warmup"}, {"k", 5}}, json{{"tags", {"optimizer"}}}},
        {}});
}

}  // namespace semaclaw::wiki
