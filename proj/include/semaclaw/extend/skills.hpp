#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace semaclaw::extend {

struct SkillSection {
    std::string name;
    std::string route;    // from a "route: <hint>" line, may be empty
    std::string content;  // section body without its heading and route line
};

struct SkillManifest {
    std::string skill_id;  // directory name
    std::string name;
    std::string description;
    bool active = false;
    std::vector<SkillSection> sections;
    std::filesystem::path root;
};

/// Catalog row: name, description and activation state only.
struct SkillSummary {
    std::string skill_id;
    std::string name;
    std::string description;
    bool active = false;
};

/// Parses a SKILL.md: YAML frontmatter with name/description, then
/// "## <section>" blocks. Throws Errc::validation on duplicate sections or a
/// missing name.
SkillManifest parse_skill(const std::string& skill_id, const std::string& skill_md);

/// Skills installed as <skills_dir>/<id>/SKILL.md, with activation state kept
/// in a small JSON file. Both are re-read on every call, so a toggle from any
/// process applies to the next context assembly.
class SkillRegistry {
public:
    SkillRegistry(std::filesystem::path skills_dir, std::filesystem::path state_file);

    std::vector<SkillSummary> list_skills() const;
    void set_skill_active(const std::string& skill_id, bool active);
    /// Errors: not_found (skill or section), invalid_state (skill inactive).
    std::string load_skill_section(const std::string& skill_id, const std::string& section) const;

    /// Level-one injection: "- name: description" per active skill, with the
    /// section names that can be loaded on demand. Empty when none are active.
    std::string context_block() const;

    std::optional<SkillManifest> manifest(const std::string& skill_id) const;

private:
    std::vector<SkillManifest> scan() const;
    std::vector<std::string> load_active() const;

    std::filesystem::path skills_dir_;
    std::filesystem::path state_file_;
    mutable std::mutex mu_;
};

}  // namespace semaclaw::extend
