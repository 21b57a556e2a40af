#pragma once

#include <filesystem>
#include <string>

namespace semaclaw::context {

namespace fs = std::filesystem;

inline constexpr const char* kSoulFile = "SOUL.md";
inline constexpr const char* kMemoryIndexFile = "MEMORY.md";
inline constexpr const char* kWorkspaceContextFile = "AGENTS.md";

inline constexpr const char* kSoulHeading = "## Soul";
inline constexpr const char* kMemoryIndexHeading = "## Memory Index";
inline constexpr const char* kWorkspaceHeading = "## Workspace Context";

struct AgentIdentity {
    std::string folder;  // namespace key, unique system-wide
    std::string name;
    std::string channel;
    fs::path data_dir;
    fs::path default_workspace;

    fs::path soul_path() const { return data_dir / kSoulFile; }
    fs::path memory_index_path() const { return data_dir / kMemoryIndexFile; }
    fs::path memory_dir() const { return data_dir / "memory"; }
    fs::path wiki_root() const { return data_dir / "wiki"; }
    fs::path index_dir() const { return data_dir / "index"; }
};

/// Folder ids are non-empty, at most 64 bytes of [A-Za-z0-9_.-], and do not
/// start with a dot. Throws Errc::validation.
void validate_folder(const std::string& folder);

std::string default_soul_md(const AgentIdentity& identity);

/// Creates data_dir, memory/, wiki/inbox/ and the default workspace, and seeds
/// SOUL.md only when it does not exist. Returns whether anything was created.
bool ensure_agent_dirs(const AgentIdentity& identity);

/// The three-part context injected into every session of an agent.
struct PersonaBundle {
    std::string soul;
    std::string memory_index;
    std::string workspace_context;

    /// Soul, memory index, workspace context, each under its fixed heading.
    std::string serialize() const;

    bool operator==(const PersonaBundle&) const = default;
};

/// Pure read of SOUL.md (required), MEMORY.md and <workspace>/AGENTS.md.
PersonaBundle resolve_persona(const AgentIdentity& identity, const fs::path& workspace);

}  // namespace semaclaw::context
