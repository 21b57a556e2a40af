#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace semaclaw::memory {

using Embedding = std::vector<double>;

/// Turns texts into fixed-dimension vectors. Throws on provider failure.
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::size_t dimension() const = 0;
    virtual std::vector<Embedding> embed(const std::vector<std::string>& texts) = 0;
};

/// Deterministic signed feature hashing of word tokens, L2-normalized. Needs
/// no model, so it backs offline deployments and tests.
class HashingEmbedder final : public EmbeddingProvider {
public:
    explicit HashingEmbedder(std::size_t dimension = 256) : dimension_(dimension) {}
    std::size_t dimension() const override { return dimension_; }
    std::vector<Embedding> embed(const std::vector<std::string>& texts) override;

private:
    std::size_t dimension_;
};

/// Cosine similarity clamped to [0, 1]; 0 when either vector is all zeros.
double cosine_similarity(const Embedding& a, const Embedding& b);

}  // namespace semaclaw::memory
