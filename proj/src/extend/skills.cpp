#include "semaclaw/extend/skills.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "semaclaw/common/error.hpp"
#include "semaclaw/common/frontmatter.hpp"
#include "semaclaw/common/fs.hpp"
#include "semaclaw/common/text.hpp"

namespace semaclaw::extend {

SkillManifest parse_skill(const std::string& skill_id, const std::string& skill_md) {
    auto doc = parse_frontmatter(skill_md);
    SkillManifest m;
    m.skill_id = skill_id;
    if (doc.header) {
        m.name = doc.header->value("name", "");
        m.description = doc.header->value("description", "");
    }
    if (m.name.empty()) fail(Errc::validation, "skill '" + skill_id + "' has no name in its frontmatter");

    std::istringstream in(doc.body);
    std::string line;
    SkillSection* current = nullptr;
    std::set<std::string> seen;
    while (std::getline(in, line)) {
        if (line.starts_with("## ")) {
            auto name = text::trim(line.substr(3));
            if (!seen.insert(name).second) {
                fail(Errc::validation, "skill '" + skill_id + "' repeats section '" + name + "'");
            }
            m.sections.push_back(SkillSection{name, {}, {}});
            current = &m.sections.back();
            continue;
        }
        if (!current) continue;
        if (current->route.empty() && line.starts_with("route:")) {
            current->route = text::trim(line.substr(6));
            continue;
        }
        current->content += line;
        current->content += '\n';
    }
    for (auto& s : m.sections) s.content = text::trim(s.content);
    return m;
}

SkillRegistry::SkillRegistry(std::filesystem::path skills_dir, std::filesystem::path state_file)
    : skills_dir_(std::move(skills_dir)), state_file_(std::move(state_file)) {}

std::vector<std::string> SkillRegistry::load_active() const {
    auto text = fsutil::try_read_file(state_file_);
    if (!text) return {};
    try {
        return nlohmann::json::parse(*text).value("active", std::vector<std::string>{});
    } catch (const nlohmann::json::exception&) {
        return {};
    }
}

std::vector<SkillManifest> SkillRegistry::scan() const {
    std::vector<SkillManifest> out;
    std::error_code ec;
    if (!std::filesystem::is_directory(skills_dir_)) return out;
    auto active = load_active();
    for (const auto& e : std::filesystem::directory_iterator(skills_dir_, ec)) {
        auto md = e.path() / "SKILL.md";
        if (!e.is_directory() || !std::filesystem::exists(md)) continue;
        auto id = e.path().filename().string();
        auto m = parse_skill(id, fsutil::read_file(md));
        m.root = e.path();
        m.active = std::find(active.begin(), active.end(), id) != active.end();
        out.push_back(std::move(m));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.skill_id < b.skill_id; });
    return out;
}

std::vector<SkillSummary> SkillRegistry::list_skills() const {
    std::lock_guard lock(mu_);
    std::vector<SkillSummary> out;
    for (auto& m : scan()) out.push_back({m.skill_id, m.name, m.description, m.active});
    return out;
}

std::optional<SkillManifest> SkillRegistry::manifest(const std::string& skill_id) const {
    std::lock_guard lock(mu_);
    for (auto& m : scan()) {
        if (m.skill_id == skill_id) return m;
    }
    return std::nullopt;
}

void SkillRegistry::set_skill_active(const std::string& skill_id, bool active) {
    std::lock_guard lock(mu_);
    auto skills = scan();
    if (std::none_of(skills.begin(), skills.end(), [&](const auto& m) { return m.skill_id == skill_id; })) {
        fail(Errc::not_found, "skill '" + skill_id + "' is not installed");
    }
    auto ids = load_active();
    std::erase(ids, skill_id);
    if (active) ids.push_back(skill_id);
    std::sort(ids.begin(), ids.end());
    fsutil::atomic_write(state_file_, nlohmann::json{{"active", ids}}.dump(2));
}

std::string SkillRegistry::load_skill_section(const std::string& skill_id, const std::string& section) const {
    auto m = manifest(skill_id);
    if (!m) fail(Errc::not_found, "skill '" + skill_id + "' is not installed");
    if (!m->active) fail(Errc::invalid_state, "skill '" + skill_id + "' is not active");
    for (const auto& s : m->sections) {
        if (s.name == section) return s.content;
    }
    fail(Errc::not_found, "skill '" + skill_id + "' has no section '" + section + "'");
}

std::string SkillRegistry::context_block() const {
    std::string out;
    for (const auto& s : list_skills()) {
        if (!s.active) continue;
        out += "- " + s.name + ": " + s.description + "\n";
    }
    return out;
}

}  // namespace semaclaw::extend
