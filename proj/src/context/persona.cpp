#include "semaclaw/context/persona.hpp"

#include <mutex>

#include "semaclaw/common/error.hpp"
#include "semaclaw/common/fs.hpp"
#include "semaclaw/common/lock.hpp"

namespace semaclaw::context {

void validate_folder(const std::string& folder) {
    if (folder.empty() || folder.size() > 64 || folder[0] == '.') {
        fail(Errc::validation, "invalid agent folder '" + folder + "'");
    }
    for (char c : folder) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                  c == '-' || c == '_' || c == '.';
        if (!ok) fail(Errc::validation, "invalid character in agent folder '" + folder + "'");
    }
}

std::string default_soul_md(const AgentIdentity& identity) {
    return "# " + identity.name + "\n\n" +
           "- name: " + identity.name + "\n" +
           "- folder: " + identity.folder + "\n" +
           "- default workspace: " + identity.default_workspace.string() + "\n\n" +
           "Role: (describe who this agent is and how it should behave)\n";
}

bool ensure_agent_dirs(const AgentIdentity& identity) {
    validate_folder(identity.folder);
    if (identity.data_dir.empty()) fail(Errc::validation, "agent data_dir is empty");

    std::error_code ec;
    fs::create_directories(identity.data_dir.parent_path(), ec);
    // Serialize seeding per folder, across threads and processes.
    static std::mutex process_mu;
    std::lock_guard guard(process_mu);
    auto lock_path = identity.data_dir.parent_path() / ("." + identity.folder + ".lock");
    auto lock = AdvisoryLock::acquire(lock_path);

    bool created = false;
    auto make_dir = [&](const fs::path& p) {
        if (p.empty() || fs::is_directory(p)) return;
        fs::create_directories(p, ec);
        if (ec) fail(Errc::io, "cannot create " + p.string() + ": " + ec.message());
        created = true;
    };
    make_dir(identity.data_dir);
    make_dir(identity.memory_dir());
    make_dir(identity.wiki_root() / "inbox");
    make_dir(identity.default_workspace);

    if (!fs::exists(identity.soul_path())) {
        fsutil::atomic_write(identity.soul_path(), default_soul_md(identity));
        created = true;
    }
    return created;
}

std::string PersonaBundle::serialize() const {
    std::string out;
    out += kSoulHeading;
    out += "\n\n" + soul + "\n\n";
    out += kMemoryIndexHeading;
    out += "\n\n" + memory_index + "\n\n";
    out += kWorkspaceHeading;
    out += "\n\n" + workspace_context + "\n";
    return out;
}

PersonaBundle resolve_persona(const AgentIdentity& identity, const fs::path& workspace) {
    auto soul = fsutil::try_read_file(identity.soul_path());
    if (!soul) {
        fail(Errc::invalid_state, "agent '" + identity.folder + "' is not seeded: missing " +
                                      identity.soul_path().string());
    }
    PersonaBundle bundle;
    bundle.soul = std::move(*soul);
    bundle.memory_index = fsutil::try_read_file(identity.memory_index_path()).value_or("");
    if (!workspace.empty()) {
        bundle.workspace_context =
            fsutil::try_read_file(workspace / kWorkspaceContextFile).value_or("");
    }
    return bundle;
}

}  // namespace semaclaw::context
