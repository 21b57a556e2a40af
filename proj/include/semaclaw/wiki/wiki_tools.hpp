#pragma once

#include "semaclaw/extend/tools.hpp"
#include "semaclaw/wiki/wiki_store.hpp"

namespace semaclaw::wiki {

/// Registers wiki_tree, wiki_mkdir, wiki_save, wiki_organize and wiki_search
/// against the calling agent's wiki. wiki_search syncs the wiki index first.
void register_wiki_tools(extend::ToolRegistry& tools, WikiHub& hub);

}  // namespace semaclaw::wiki
