#include "semaclaw/memory/hybrid.hpp"

#include <algorithm>

namespace semaclaw::memory {

double merge_score(std::optional<double> vec_score, std::optional<double> fts_score) noexcept {
    if (vec_score && fts_score) return *vec_score * kBaseFactor + *fts_score * kKeywordBlend;
    if (vec_score) return *vec_score * kBaseFactor;
    if (fts_score) return *fts_score * kBaseFactor;
    return 0.0;
}

std::vector<ScoredId> min_max_normalize(std::vector<ScoredId> hits) {
    if (hits.empty()) return hits;
    auto [lo, hi] = std::minmax_element(hits.begin(), hits.end(),
                                        [](const auto& a, const auto& b) { return a.score < b.score; });
    const double min = lo->score;
    const double range = hi->score - min;
    for (auto& h : hits) h.score = range > 0 ? (h.score - min) / range : 1.0;
    return hits;
}

}  // namespace semaclaw::memory
