#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "semaclaw/extend/schema.hpp"
#include "semaclaw/permbridge/policy.hpp"

namespace semaclaw::extend {

using permbridge::Tier;

struct ToolCallContext {
    std::string session_id;
    std::string agent_folder;
    std::filesystem::path workspace;
};

/// Returns the result text handed back to the model; may throw.
using ToolHandler = std::function<std::string(const ToolCallContext&, const nlohmann::json& args)>;

struct ToolSpec {
    std::string name;
    std::string description;
    ArgSchema schema;
    ToolHandler handler;
    std::vector<nlohmann::json> examples;  // must validate against schema
    Tier tier = Tier::external;            // assigned at registration
};

/// Typed tool registry with copy-on-write snapshots.
class ToolRegistry {
public:
    /// Bundled harness tool. The name must be in the bundled set; tier becomes internal.
    void register_builtin(ToolSpec spec);
    /// User-installed tool; always external.
    void install(ToolSpec spec);

    std::optional<ToolSpec> find(const std::string& name) const;
    std::vector<ToolSpec> list() const;

private:
    void add(ToolSpec spec);

    mutable std::mutex mu_;
    std::shared_ptr<const std::map<std::string, ToolSpec>> tools_ =
        std::make_shared<const std::map<std::string, ToolSpec>>();
};

/// Loads user-installed command tools from `dir/*.json`:
/// {"name", "description", "schema": {"fields": [...]}, "command": "..."}.
/// The command runs through /bin/sh with the JSON arguments on stdin; its
/// stdout is the result, a nonzero exit status an error.
std::vector<ToolSpec> load_command_tools(const std::filesystem::path& dir);

}  // namespace semaclaw::extend
