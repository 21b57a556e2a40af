#include "semaclaw/memory/vector_index.hpp"

#include <algorithm>
#include <cmath>

#include "semaclaw/common/text.hpp"

namespace semaclaw::memory {

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace

std::vector<Embedding> HashingEmbedder::embed(const std::vector<std::string>& texts) {
    std::vector<Embedding> out;
    out.reserve(texts.size());
    for (const auto& t : texts) {
        Embedding v(dimension_, 0.0);
        for (const auto& tok : text::tokenize(t)) {
            auto h = fnv1a(tok);
            v[h % dimension_] += (h >> 63) ? -1.0 : 1.0;
        }
        double norm = 0;
        for (double x : v) norm += x * x;
        if (norm > 0) {
            norm = std::sqrt(norm);
            for (double& x : v) x /= norm;
        }
        out.push_back(std::move(v));
    }
    return out;
}

double cosine_similarity(const Embedding& a, const Embedding& b) {
    if (a.size() != b.size() || a.empty()) return 0.0;
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0 || nb == 0) return 0.0;
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

const Embedding* VectorIndex::get(const std::string& id) const {
    auto it = vectors_.find(id);
    return it == vectors_.end() ? nullptr : &it->second;
}

std::vector<ScoredId> VectorIndex::search(const Embedding& query, double min_similarity,
                                          const std::function<bool(const std::string&)>& accept) const {
    std::vector<ScoredId> out;
    for (const auto& [id, v] : vectors_) {
        if (accept && !accept(id)) continue;
        double s = cosine_similarity(query, v);
        if (s >= min_similarity && s > 0.0) out.push_back({id, s});
    }
    return out;
}

}  // namespace semaclaw::memory
