#pragma once
// Embedding provider abstraction and cosine similarity for semantic
// filtering. The hashed fallback keeps the whole pipeline offline-runnable;
// the remote kind speaks the {input, model} POST protocol.

#include <cstddef>
#include <string>
#include <vector>

#include "flexqa/provider.hpp"

namespace flexqa {

inline constexpr size_t kDefaultEmbedDim = 384;

class Embedder {
public:
    // Deterministic bag-of-tokens hashing: each normalized token adds ±1 to
    // one bucket; the result is L2-normalized.
    static Embedder fallback(size_t dim = kDefaultEmbedDim);

    static Embedder remote(std::string endpoint, std::string model, std::string api_key,
                           size_t dim = kDefaultEmbedDim, RetryPolicy retry = {});

    // Throws EmptyTextError when nothing survives normalization;
    // ProviderError / DimMismatchError on remote failures.
    std::vector<double> embed(const std::string& text) const;

    size_t dim() const { return dim_; }
    bool is_remote() const { return remote_; }

private:
    Embedder() = default;

    bool remote_ = false;
    size_t dim_ = kDefaultEmbedDim;
    std::string endpoint_, model_, api_key_;
    RetryPolicy retry_;
};

// Dot product of two vectors; the inputs are unit-norm already, so this is
// cosine similarity. Throws DimMismatchError.
double cosine(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace flexqa
