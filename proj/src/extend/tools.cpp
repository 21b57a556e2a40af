#include "semaclaw/extend/tools.hpp"

#include "semaclaw/common/error.hpp"
#include "semaclaw/common/fs.hpp"
#include "semaclaw/common/process.hpp"

namespace semaclaw::extend {

void ToolRegistry::register_builtin(ToolSpec spec) {
    if (!permbridge::is_bundled(spec.name)) {
        fail(Errc::validation, "'" + spec.name + "' is not a bundled harness tool");
    }
    spec.tier = Tier::internal;
    add(std::move(spec));
}

void ToolRegistry::install(ToolSpec spec) {
    spec.tier = Tier::external;
    add(std::move(spec));
}

void ToolRegistry::add(ToolSpec spec) {
    if (spec.name.empty()) fail(Errc::validation, "tool name is empty");
    if (!spec.handler) fail(Errc::validation, "tool '" + spec.name + "' has no handler");
    for (const auto& ex : spec.examples) {
        if (auto err = spec.schema.validate(ex)) {
            fail(Errc::validation, "tool '" + spec.name + "' example does not validate: " + *err);
        }
    }
    std::lock_guard lock(mu_);
    if (tools_->count(spec.name)) fail(Errc::validation, "tool '" + spec.name + "' already registered");
    auto next = std::make_shared<std::map<std::string, ToolSpec>>(*tools_);
    next->emplace(spec.name, std::move(spec));
    tools_ = std::move(next);
}

std::optional<ToolSpec> ToolRegistry::find(const std::string& name) const {
    std::shared_ptr<const std::map<std::string, ToolSpec>> snap;
    {
        std::lock_guard lock(mu_);
        snap = tools_;
    }
    auto it = snap->find(name);
    if (it == snap->end()) return std::nullopt;
    return it->second;
}

std::vector<ToolSpec> ToolRegistry::list() const {
    std::shared_ptr<const std::map<std::string, ToolSpec>> snap;
    {
        std::lock_guard lock(mu_);
        snap = tools_;
    }
    std::vector<ToolSpec> out;
    for (const auto& [name, spec] : *snap) out.push_back(spec);
    return out;
}

std::vector<ToolSpec> load_command_tools(const std::filesystem::path& dir) {
    std::vector<ToolSpec> out;
    std::error_code ec;
    if (!std::filesystem::is_directory(dir)) return out;
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir, ec)) {
        if (e.path().extension() == ".json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(fsutil::read_file(path));
        } catch (const nlohmann::json::exception& e) {
            fail(Errc::config, path.string() + ": " + e.what());
        }
        ToolSpec spec;
        spec.name = j.at("name");
        spec.description = j.value("description", "");
        spec.schema = ArgSchema::from_json(j.value("schema", nlohmann::json::object()));
        auto command = j.at("command").get<std::string>();
        spec.handler = [command](const ToolCallContext& ctx, const nlohmann::json& args) {
            ProcessOptions opts;
            opts.stdin_data = args.dump();
            if (!ctx.workspace.empty() && std::filesystem::is_directory(ctx.workspace)) opts.workdir = ctx.workspace;
            opts.timeout = std::chrono::minutes{5};
            auto r = run_shell(command, opts);
            if (r.timed_out) throw std::runtime_error("command timed out");
            if (r.exit_code != 0) {
                throw std::runtime_error("command exited with status " + std::to_string(r.exit_code) +
                                         (r.err.empty() ? "" : ": " + r.err));
            }
            return r.out;
        };
        out.push_back(std::move(spec));
    }
    return out;
}

}  // namespace semaclaw::extend
