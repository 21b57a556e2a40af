#include "semaclaw/memory/bm25.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace semaclaw::memory {

void Bm25Index::add(const std::string& id, const std::vector<std::string>& tokens) {
    remove(id);
    std::map<std::string, int> tf;
    for (const auto& t : tokens) ++tf[t];
    auto& terms = doc_terms_[id];
    for (const auto& [term, count] : tf) {
        postings_[term][id] = count;
        terms.push_back(term);
    }
    doc_len_[id] = tokens.size();
    total_len_ += tokens.size();
}

void Bm25Index::remove(const std::string& id) {
    auto it = doc_len_.find(id);
    if (it == doc_len_.end()) return;
    total_len_ -= it->second;
    doc_len_.erase(it);
    for (const auto& term : doc_terms_[id]) {
        auto p = postings_.find(term);
        if (p == postings_.end()) continue;
        p->second.erase(id);
        if (p->second.empty()) postings_.erase(p);
    }
    doc_terms_.erase(id);
}

void Bm25Index::clear() {
    postings_.clear();
    doc_len_.clear();
    doc_terms_.clear();
    total_len_ = 0;
}

std::vector<ScoredId> Bm25Index::search(const std::vector<std::string>& query_terms,
                                        const std::function<bool(const std::string&)>& accept) const {
    const double n_docs = static_cast<double>(doc_len_.size());
    if (n_docs == 0) return {};
    const double avgdl = static_cast<double>(total_len_) / n_docs;
    std::set<std::string> terms(query_terms.begin(), query_terms.end());

    std::map<std::string, double> scores;
    for (const auto& term : terms) {
        auto p = postings_.find(term);
        if (p == postings_.end()) continue;
        const double df = static_cast<double>(p->second.size());
        const double idf = std::log(1.0 + (n_docs - df + 0.5) / (df + 0.5));
        for (const auto& [id, tf] : p->second) {
            if (accept && !accept(id)) continue;
            const double dl = static_cast<double>(doc_len_.at(id));
            const double f = static_cast<double>(tf);
            const double norm = avgdl > 0 ? dl / avgdl : 0.0;
            scores[id] += idf * (f * (kK1 + 1.0)) / (f + kK1 * (1.0 - kB + kB * norm));
        }
    }
    std::vector<ScoredId> out;
    out.reserve(scores.size());
    for (auto& [id, s] : scores) out.push_back({id, s});
    return out;
}

}  // namespace semaclaw::memory
