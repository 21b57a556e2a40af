#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include "semaclaw/memory/bm25.hpp"
#include "semaclaw/memory/embedding.hpp"
#include "semaclaw/memory/vector_index.hpp"

namespace semaclaw::memory {

namespace fs = std::filesystem;

enum class Source { memory, session, wiki };

std::string_view to_string(Source s) noexcept;

struct Chunk {
    std::string doc_id;  // "<relative file>#<chunk index>"
    Source source = Source::memory;
    std::string file;    // relative to the corpus root, generic separators
    std::optional<std::string> date;
    std::string text;
};

struct CorpusFile {
    std::string rel;
    Source source = Source::memory;
    std::optional<std::string> date;
    bool has_frontmatter = false;  // index only the body after a YAML header
};

struct SyncStats {
    std::size_t files_indexed = 0;
    std::size_t chunks = 0;
    std::size_t files_removed = 0;
    std::size_t embed_failures = 0;
};

inline constexpr std::size_t kMaxChunkTokens = 256;

/// Paragraph chunks; a paragraph longer than `max_tokens` is split at
/// whitespace into pieces that fit.
std::vector<std::string> chunk_text(std::string_view body, std::size_t max_tokens = kMaxChunkTokens);

/// Keyword + vector index over a set of files below one root, persisted as a
/// versioned JSON document. Document tokens are indexed unfiltered.
class CorpusIndex {
public:
    static constexpr int kSchemaVersion = 1;

    CorpusIndex(fs::path root, fs::path store_file, std::shared_ptr<EmbeddingProvider> embedder);

    /// Re-indexes files that are forced, never indexed, or changed on disk, and
    /// drops indexed files that are no longer listed or no longer exist.
    SyncStats sync(const std::vector<CorpusFile>& files, const std::set<std::string>& forced);

    void purge(const std::vector<std::string>& rels);

    /// False after the store failed to load, until the next sync rebuilds it.
    bool keyword_available() const;
    bool vector_available() const { return embedder_ != nullptr; }

    std::vector<ScoredId> keyword_search(const std::vector<std::string>& terms,
                                         const std::function<bool(const Chunk&)>& accept = {}) const;
    /// Throws whatever the embedding provider throws.
    std::vector<ScoredId> vector_search(const std::string& query_text, double min_similarity,
                                        const std::function<bool(const Chunk&)>& accept = {}) const;

    std::optional<Chunk> chunk(const std::string& doc_id) const;
    std::vector<Chunk> chunks() const;
    std::set<std::string> indexed_files() const;
    const fs::path& root() const noexcept { return root_; }

private:
    struct FileEntry {
        std::uint64_t hash = 0;
        std::vector<std::string> chunk_ids;
    };

    void load();
    void persist() const;
    void drop_file_locked(const std::string& rel);
    std::function<bool(const std::string&)> id_filter(const std::function<bool(const Chunk&)>& accept) const;

    fs::path root_;
    fs::path store_file_;
    std::shared_ptr<EmbeddingProvider> embedder_;

    mutable std::shared_mutex mu_;
    bool keyword_ok_ = true;
    std::map<std::string, Chunk> chunks_;
    std::map<std::string, FileEntry> files_;
    Bm25Index bm25_;
    VectorIndex vectors_;
};

}  // namespace semaclaw::memory
