#pragma once

#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

namespace semaclaw::memory {

struct ScoredId {
    std::string id;
    double score = 0.0;
};

/// Okapi BM25 over pre-tokenized documents (k1 = 1.2, b = 0.75,
/// idf = ln(1 + (N - n + 0.5) / (n + 0.5))). Documents are indexed with every
/// token they contain; any filtering is the caller's business.
class Bm25Index {
public:
    static constexpr double kK1 = 1.2;
    static constexpr double kB = 0.75;

    void add(const std::string& id, const std::vector<std::string>& tokens);
    void remove(const std::string& id);
    void clear();

    std::size_t size() const noexcept { return doc_len_.size(); }

    /// Scores every document that contains at least one query term. Query
    /// terms are deduplicated and summed in lexicographic order. Documents
    /// rejected by `accept` are skipped but still count toward N and avgdl.
    std::vector<ScoredId> search(const std::vector<std::string>& query_terms,
                                 const std::function<bool(const std::string&)>& accept = {}) const;

private:
    // term -> (doc id -> term frequency)
    std::unordered_map<std::string, std::map<std::string, int>> postings_;
    std::unordered_map<std::string, std::size_t> doc_len_;
    std::unordered_map<std::string, std::vector<std::string>> doc_terms_;
    std::size_t total_len_ = 0;
};

}  // namespace semaclaw::memory
