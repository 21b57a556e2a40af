#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "semaclaw/context/persona.hpp"

namespace semaclaw::context {

/// Registered agent identities, persisted as <data_root>/agents.json. The file
/// is re-read on every query so registrations made by another process (the
/// CLI) are visible to a running daemon.
class AgentRegistry {
public:
    explicit AgentRegistry(fs::path data_root);

    /// Registers and seeds an agent. data_dir defaults to
    /// <data_root>/agents/<folder>, default_workspace to <data_dir>/workspace.
    /// Throws Errc::validation if the folder is already taken.
    AgentIdentity add(AgentIdentity identity);

    /// Sorted by folder.
    std::vector<AgentIdentity> all() const;
    std::optional<AgentIdentity> find_folder(const std::string& folder) const;

    const fs::path& data_root() const noexcept { return data_root_; }

private:
    std::vector<AgentIdentity> load() const;
    void save(const std::vector<AgentIdentity>& agents) const;

    fs::path data_root_;
    fs::path file_;
    mutable std::mutex mu_;
};

}  // namespace semaclaw::context
