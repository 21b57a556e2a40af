#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "semaclaw/memory/bm25.hpp"
#include "semaclaw/memory/embedding.hpp"

namespace semaclaw::memory {

/// Brute-force cosine index.
class VectorIndex {
public:
    void upsert(const std::string& id, Embedding v) { vectors_[id] = std::move(v); }
    void remove(const std::string& id) { vectors_.erase(id); }
    void clear() { vectors_.clear(); }
    std::size_t size() const noexcept { return vectors_.size(); }
    bool contains(const std::string& id) const { return vectors_.count(id) != 0; }
    const Embedding* get(const std::string& id) const;

    /// Every accepted vector with similarity >= min_similarity.
    std::vector<ScoredId> search(const Embedding& query, double min_similarity,
                                 const std::function<bool(const std::string&)>& accept = {}) const;

private:
    std::map<std::string, Embedding> vectors_;
};

}  // namespace semaclaw::memory
