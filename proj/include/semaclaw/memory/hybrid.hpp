#pragma once

#include <optional>
#include <vector>

#include "semaclaw/memory/bm25.hpp"

namespace semaclaw::memory {

/// Weight of a document's primary path score. Documents found by only one
/// path get exactly this factor, so keyword-only hits are not penalized
/// against vector-only hits.
inline constexpr double kBaseFactor = 0.7;
/// Weight of the keyword score for documents found by both paths.
inline constexpr double kKeywordBlend = 0.3;
/// Below this cosine similarity a vector hit does not count as a result.
inline constexpr double kVectorQualityThreshold = 0.25;

/// both:  vec * 0.7 + fts * 0.3
/// one:   score * 0.7
/// none:  0
double merge_score(std::optional<double> vec_score, std::optional<double> fts_score) noexcept;

/// Per-query min-max scaling to [0, 1]. A single candidate, or candidates that
/// all tie, map to 1.
std::vector<ScoredId> min_max_normalize(std::vector<ScoredId> hits);

}  // namespace semaclaw::memory
