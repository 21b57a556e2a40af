#include "semaclaw/memory/memory_store.hpp"

#include <algorithm>
#include <regex>

#include "semaclaw/common/error.hpp"
#include "semaclaw/common/fs.hpp"
#include "semaclaw/memory/hybrid.hpp"

namespace semaclaw::memory {

namespace {

const std::regex kDatedLog(R"((\d{4}-\d{2}-\d{2})\.md)");

bool accepts(SourceFilter filter, Source s) {
    switch (filter) {
        case SourceFilter::all: return true;
        case SourceFilter::memory: return s == Source::memory;
        case SourceFilter::session: return s == Source::session;
    }
    return true;
}

void sort_and_truncate(std::vector<MemoryRecord>& records, int k) {
    std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
        if (a.merged_score != b.merged_score) return a.merged_score > b.merged_score;
        return a.doc_id < b.doc_id;
    });
    if (records.size() > static_cast<std::size_t>(k)) records.resize(static_cast<std::size_t>(k));
}

MemoryRecord record_from(const Chunk& c) {
    MemoryRecord r;
    r.doc_id = c.doc_id;
    r.source = c.source;
    r.file = c.file;
    r.date = c.date;
    r.chunk = c.text;
    return r;
}

}  // namespace

SourceFilter source_filter_from_string(std::string_view s) {
    if (s == "memory") return SourceFilter::memory;
    if (s == "session") return SourceFilter::session;
    if (s == "all" || s.empty()) return SourceFilter::all;
    fail(Errc::argument, "source must be memory, session or all");
}

MemoryStore::MemoryStore(context::AgentIdentity identity, MemoryOptions options)
    : identity_(std::move(identity)),
      options_(std::move(options)),
      index_(identity_.data_dir, identity_.index_dir() / "memory.json", options_.embedder) {
    if (!options_.stopwords) options_.stopwords = std::make_shared<text::StopwordList>();
}

std::filesystem::path MemoryStore::append_daily_log(std::string_view user_prompt, TimePoint timestamp) {
    auto date = format_date(timestamp);
    auto path = identity_.memory_dir() / (date + ".md");
    {
        std::lock_guard lock(log_mu_);
        std::error_code ec;
        std::filesystem::create_directories(identity_.memory_dir(), ec);
        std::string entry = "## " + format_time_of_day(timestamp) + "\n";
        entry.append(user_prompt);
        entry += "\n\n";
        fsutil::append_file(path, entry);
    }
    mark_dirty(date);
    return path;
}

std::vector<std::filesystem::path> MemoryStore::enforce_retention(TimePoint today) {
    using namespace std::chrono;
    const auto today_day = floor<days>(today);
    std::vector<std::filesystem::path> removed;
    std::vector<std::string> rels;
    std::error_code ec;
    if (!std::filesystem::is_directory(identity_.memory_dir())) return removed;
    for (const auto& entry : std::filesystem::directory_iterator(identity_.memory_dir(), ec)) {
        std::smatch m;
        auto name = entry.path().filename().string();
        if (!entry.is_regular_file() || !std::regex_match(name, m, kDatedLog)) continue;
        TimePoint date;
        try {
            date = parse_date(m[1].str());
        } catch (const Error&) {
            continue;
        }
        if (today_day - floor<days>(date) >= days{kRetentionDays}) {
            removed.push_back(entry.path());
            rels.push_back("memory/" + name);
        }
    }
    std::sort(removed.begin(), removed.end());
    for (const auto& p : removed) std::filesystem::remove(p, ec);
    index_.purge(rels);
    return removed;
}

std::vector<CorpusFile> MemoryStore::corpus_files() const {
    std::vector<CorpusFile> files;
    if (std::filesystem::exists(identity_.memory_index_path())) {
        files.push_back({context::kMemoryIndexFile, Source::memory, std::nullopt});
    }
    std::error_code ec;
    if (std::filesystem::is_directory(identity_.memory_dir())) {
        for (const auto& entry : std::filesystem::directory_iterator(identity_.memory_dir(), ec)) {
            std::smatch m;
            auto name = entry.path().filename().string();
            if (entry.is_regular_file() && std::regex_match(name, m, kDatedLog)) {
                files.push_back({"memory/" + name, Source::memory, m[1].str()});
            }
        }
    }
    std::sort(files.begin(), files.end(), [](const auto& a, const auto& b) { return a.rel < b.rel; });
    return files;
}

SyncStats MemoryStore::index_sync() {
    std::lock_guard sync_lock(sync_mu_);
    std::set<std::string> forced;
    std::set<std::string> taken;
    {
        std::lock_guard lock(dirty_mu_);
        taken.swap(dirty_);
    }
    for (const auto& d : taken) forced.insert("memory/" + d + ".md");
    return index_.sync(corpus_files(), forced);
}

void MemoryStore::mark_dirty(const std::string& date) {
    std::lock_guard lock(dirty_mu_);
    dirty_.insert(date);
}

std::set<std::string> MemoryStore::dirty_dates() const {
    std::lock_guard lock(dirty_mu_);
    return dirty_;
}

SearchResult MemoryStore::hybrid_search(const RetrievalQuery& q) const {
    if (q.k <= 0 || q.k > kMaxResults) fail(Errc::argument, "k must be in [1, 100]");
    auto terms = options_.stopwords->filter(text::tokenize(q.text));
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());

    auto accept = [&q](const Chunk& c) { return accepts(q.source_filter, c.source); };

    std::vector<ScoredId> keyword;
    bool keyword_ok = options_.keyword_enabled && index_.keyword_available();
    if (keyword_ok) {
        try {
            keyword = min_max_normalize(index_.keyword_search(terms, accept));
        } catch (const std::exception&) {
            keyword_ok = false;
        }
    }
    if (!keyword_ok) return token_scan(terms, q);

    std::vector<ScoredId> vector;
    if (index_.vector_available() && !terms.empty()) {
        std::string joined;
        for (const auto& t : terms) joined += (joined.empty() ? "" : " ") + t;
        try {
            vector = index_.vector_search(joined, kVectorQualityThreshold, accept);
        } catch (const std::exception&) {
            vector.clear();
        }
    }

    SearchResult result;
    std::map<std::string, MemoryRecord> merged;
    auto record_for = [&](const std::string& id) -> MemoryRecord* {
        auto it = merged.find(id);
        if (it != merged.end()) return &it->second;
        auto chunk = index_.chunk(id);
        if (!chunk) return nullptr;
        return &merged.emplace(id, record_from(*chunk)).first->second;
    };
    for (const auto& h : keyword) {
        if (auto* r = record_for(h.id)) r->fts_score = h.score;
    }
    if (vector.empty()) {
        result.level = SearchLevel::keyword_only;
    } else {
        result.level = SearchLevel::hybrid;
        for (const auto& h : vector) {
            if (auto* r = record_for(h.id)) r->vec_score = h.score;
        }
    }
    for (auto& [id, r] : merged) {
        r.merged_score = merge_score(r.vec_score, r.fts_score);
        result.records.push_back(std::move(r));
    }
    sort_and_truncate(result.records, q.k);
    return result;
}

SearchResult MemoryStore::token_scan(const std::vector<std::string>& terms, const RetrievalQuery& q) const {
    SearchResult result;
    result.level = SearchLevel::token_scan;
    if (terms.empty()) return result;
    std::set<std::string> wanted(terms.begin(), terms.end());
    for (const auto& f : corpus_files()) {
        if (!accepts(q.source_filter, f.source)) continue;
        auto content = fsutil::try_read_file(identity_.data_dir / f.rel);
        if (!content) continue;
        auto pieces = chunk_text(*content);
        for (std::size_t i = 0; i < pieces.size(); ++i) {
            auto toks = text::tokenize(pieces[i]);
            std::set<std::string> present(toks.begin(), toks.end());
            std::size_t overlap = 0;
            for (const auto& t : wanted) overlap += present.count(t);
            if (overlap == 0) continue;
            MemoryRecord r = record_from(Chunk{f.rel + "#" + std::to_string(i), f.source, f.rel, f.date, pieces[i]});
            r.fts_score = static_cast<double>(overlap);
            r.merged_score = merge_score(std::nullopt, r.fts_score);
            result.records.push_back(std::move(r));
        }
    }
    sort_and_truncate(result.records, q.k);
    return result;
}

MemoryStore& MemoryHub::store_for(const context::AgentIdentity& identity) {
    std::lock_guard lock(mu_);
    auto& slot = stores_[identity.folder];
    if (!slot) slot = std::make_unique<MemoryStore>(identity, options_);
    return *slot;
}

}  // namespace semaclaw::memory
