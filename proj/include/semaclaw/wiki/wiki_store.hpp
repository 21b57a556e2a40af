#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "semaclaw/common/clock.hpp"
#include "semaclaw/common/text.hpp"
#include "semaclaw/context/registry.hpp"
#include "semaclaw/memory/corpus_index.hpp"

namespace semaclaw::wiki {

namespace fs = std::filesystem;

inline constexpr const char* kInboxDir = "inbox";
inline constexpr int kMaxSlugAttempts = 100;

struct TreeNode {
    std::string name;
    std::string path;  // relative to the wiki root, "" for the root
    bool is_dir = false;
    std::vector<std::string> tags;  // entries only
    std::vector<TreeNode> children;  // directories only, sorted by name
};

nlohmann::json to_json(const TreeNode& n);

struct WikiHit {
    std::string path;
    std::string snippet;
    std::vector<std::string> tags;
    double score = 0.0;
};

nlohmann::json to_json(const WikiHit& h);

/// One agent's wiki: Markdown files with YAML frontmatter under a directory
/// tree whose folders are categories. The files are the source of truth; the
/// search index is a disposable cache next to the memory index.
class WikiStore {
public:
    WikiStore(fs::path root, fs::path index_file, std::shared_ptr<const text::StopwordList> stopwords, Clock& clock);

    /// Walks the directory at call time.
    TreeNode inspect_tree() const;

    /// Idempotent. Errors: validation on paths escaping the root.
    std::string create_category(const std::string& rel);

    /// Writes <category or inbox>/<slug>.md with tags, source "agent" and a
    /// created timestamp. Errors: validation (empty body, bad category, slug
    /// space exhausted).
    std::string save_entry(const std::string& title, const std::string& body, const std::vector<std::string>& tags,
                           const std::optional<std::string>& category);

    /// Copies `source` (relative to the root, or absolute) into `category`,
    /// merging tags and recording provenance in the frontmatter. The body is
    /// carried over byte for byte. Errors: io (unreadable source), validation.
    std::string organize_file(const std::string& source, const std::string& category,
                              const std::vector<std::string>& tags);

    std::string read_entry(const std::string& rel) const;
    void write_entry(const std::string& rel, const std::string& content);
    /// Errors: not_found (source), invalid_state (destination exists).
    std::string move_entry(const std::string& from, const std::string& to);

    memory::SyncStats index_sync();

    /// Content query ranked by BM25 over the wiki index, tag filter by exact
    /// membership (all listed tags), or both. Errors: argument when both are
    /// absent or k < 1.
    std::vector<WikiHit> search(const std::optional<std::string>& query,
                                const std::optional<std::vector<std::string>>& tags, int k = 10) const;

    const fs::path& root() const noexcept { return root_; }

private:
    std::vector<std::string> entry_files() const;
    std::vector<std::string> tags_of(const std::string& rel) const;

    fs::path root_;
    std::shared_ptr<const text::StopwordList> stopwords_;
    Clock& clock_;
    memory::CorpusIndex index_;
    std::mutex write_mu_;
};

/// Per-agent wiki stores rooted at <data_dir>/wiki with the index at
/// <data_dir>/index/wiki.json.
class WikiHub {
public:
    WikiHub(const context::AgentRegistry& agents, std::shared_ptr<const text::StopwordList> stopwords, Clock& clock)
        : agents_(agents), stopwords_(std::move(stopwords)), clock_(clock) {}

    /// Errors: not_found for unknown agents.
    WikiStore& store_for(const std::string& agent_folder);

private:
    const context::AgentRegistry& agents_;
    std::shared_ptr<const text::StopwordList> stopwords_;
    Clock& clock_;
    std::mutex mu_;
    std::map<std::string, std::unique_ptr<WikiStore>> stores_;
};

}  // namespace semaclaw::wiki
