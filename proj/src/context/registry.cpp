#include "semaclaw/context/registry.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "semaclaw/common/error.hpp"
#include "semaclaw/common/fs.hpp"
#include "semaclaw/common/lock.hpp"

namespace semaclaw::context {

AgentRegistry::AgentRegistry(fs::path data_root)
    : data_root_(std::move(data_root)), file_(data_root_ / "agents.json") {
    std::error_code ec;
    fs::create_directories(data_root_, ec);
}

AgentIdentity AgentRegistry::add(AgentIdentity identity) {
    validate_folder(identity.folder);
    if (identity.name.empty()) identity.name = identity.folder;
    if (identity.channel.empty()) identity.channel = "cli";
    if (identity.data_dir.empty()) identity.data_dir = data_root_ / "agents" / identity.folder;
    if (identity.default_workspace.empty()) identity.default_workspace = identity.data_dir / "workspace";

    std::lock_guard guard(mu_);
    auto lock = AdvisoryLock::acquire(data_root_ / ".agents.lock");
    auto agents = load();
    for (const auto& a : agents) {
        if (a.folder == identity.folder) {
            fail(Errc::validation, "agent folder '" + identity.folder + "' already registered");
        }
    }
    ensure_agent_dirs(identity);
    agents.push_back(identity);
    save(agents);
    return identity;
}

std::vector<AgentIdentity> AgentRegistry::all() const {
    std::lock_guard guard(mu_);
    auto agents = load();
    std::sort(agents.begin(), agents.end(),
              [](const auto& a, const auto& b) { return a.folder < b.folder; });
    return agents;
}

std::optional<AgentIdentity> AgentRegistry::find_folder(const std::string& folder) const {
    for (auto& a : all()) {
        if (a.folder == folder) return a;
    }
    return std::nullopt;
}

std::vector<AgentIdentity> AgentRegistry::load() const {
    auto text = fsutil::try_read_file(file_);
    if (!text) return {};
    std::vector<AgentIdentity> out;
    try {
        auto doc = nlohmann::json::parse(*text);
        for (const auto& a : doc.at("agents")) {
            out.push_back(AgentIdentity{a.at("folder"), a.at("name"), a.value("channel", "cli"),
                                        fs::path(a.at("data_dir").get<std::string>()),
                                        fs::path(a.at("default_workspace").get<std::string>())});
        }
    } catch (const nlohmann::json::exception& e) {
        fail(Errc::io, "corrupt agent registry " + file_.string() + ": " + e.what());
    }
    return out;
}

void AgentRegistry::save(const std::vector<AgentIdentity>& agents) const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& a : agents) {
        arr.push_back({{"folder", a.folder},
                       {"name", a.name},
                       {"channel", a.channel},
                       {"data_dir", a.data_dir.string()},
                       {"default_workspace", a.default_workspace.string()}});
    }
    fsutil::atomic_write(file_, nlohmann::json{{"schema_version", 1}, {"agents", arr}}.dump(2));
}

}  // namespace semaclaw::context
