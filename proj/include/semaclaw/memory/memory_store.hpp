#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "semaclaw/common/clock.hpp"
#include "semaclaw/common/text.hpp"
#include "semaclaw/context/persona.hpp"
#include "semaclaw/memory/corpus_index.hpp"

namespace semaclaw::memory {

enum class SourceFilter { memory, session, all };

SourceFilter source_filter_from_string(std::string_view s);

struct RetrievalQuery {
    std::string text;
    int k = 10;
    SourceFilter source_filter = SourceFilter::all;
};

inline constexpr int kMaxResults = 100;
inline constexpr int kRetentionDays = 50;

enum class SearchLevel { hybrid = 1, keyword_only = 2, token_scan = 3 };

struct MemoryRecord {
    std::string doc_id;
    Source source = Source::memory;
    std::string file;  // relative to the agent's data_dir
    std::optional<std::string> date;
    std::string chunk;
    std::optional<double> fts_score;  // min-max normalized BM25; raw overlap count at level 3
    std::optional<double> vec_score;
    double merged_score = 0.0;
};

struct SearchResult {
    SearchLevel level = SearchLevel::keyword_only;
    std::vector<MemoryRecord> records;
};

struct MemoryOptions {
    std::shared_ptr<EmbeddingProvider> embedder;  // null: vector path unavailable
    std::shared_ptr<const text::StopwordList> stopwords;
    bool keyword_enabled = true;
};

/// One agent's external memory: MEMORY.md plus dated daily logs, their
/// keyword/vector index, and the degrading hybrid search over it.
class MemoryStore {
public:
    MemoryStore(context::AgentIdentity identity, MemoryOptions options);

    /// Appends "## HH:MM:SS\n<prompt>\n\n" to memory/YYYY-MM-DD.md and marks
    /// that date dirty.
    std::filesystem::path append_daily_log(std::string_view user_prompt, TimePoint timestamp);

    /// Deletes dated logs at least 50 days older than `today` and purges them
    /// from the index. MEMORY.md is never touched.
    std::vector<std::filesystem::path> enforce_retention(TimePoint today);

    SyncStats index_sync();

    void mark_dirty(const std::string& date);
    void mark_dirty(TimePoint t) { mark_dirty(format_date(t)); }
    std::set<std::string> dirty_dates() const;

    /// Throws Errc::argument unless 1 <= k <= 100.
    SearchResult hybrid_search(const RetrievalQuery& q) const;

    std::vector<CorpusFile> corpus_files() const;
    const context::AgentIdentity& identity() const noexcept { return identity_; }
    const CorpusIndex& index() const noexcept { return index_; }

private:
    SearchResult token_scan(const std::vector<std::string>& terms, const RetrievalQuery& q) const;

    context::AgentIdentity identity_;
    MemoryOptions options_;
    CorpusIndex index_;
    mutable std::mutex dirty_mu_;
    std::set<std::string> dirty_;
    std::mutex log_mu_;
    std::mutex sync_mu_;
};

/// Per-agent memory stores, created on first use.
class MemoryHub {
public:
    explicit MemoryHub(MemoryOptions options) : options_(std::move(options)) {}

    MemoryStore& store_for(const context::AgentIdentity& identity);
    const MemoryOptions& options() const noexcept { return options_; }

private:
    MemoryOptions options_;
    std::mutex mu_;
    std::map<std::string, std::unique_ptr<MemoryStore>> stores_;
};

}  // namespace semaclaw::memory
