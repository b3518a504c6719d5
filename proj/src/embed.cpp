#include "flexqa/embed.hpp"

#include <cmath>

#include "flexqa/errors.hpp"
#include "flexqa/text.hpp"

namespace flexqa {

namespace {

void l2_normalize(std::vector<double>& v) {
    double norm2 = 0.0;
    for (double x : v) norm2 += x * x;
    if (norm2 <= 0.0) return;
    double inv = 1.0 / std::sqrt(norm2);
    for (double& x : v) x *= inv;
}

}  // namespace

Embedder Embedder::fallback(size_t dim) {
    Embedder e;
    e.remote_ = false;
    e.dim_ = dim;
    return e;
}

Embedder Embedder::remote(std::string endpoint, std::string model, std::string api_key,
                          size_t dim, RetryPolicy retry) {
    Embedder e;
    e.remote_ = true;
    e.dim_ = dim;
    e.endpoint_ = std::move(endpoint);
    e.model_ = std::move(model);
    e.api_key_ = std::move(api_key);
    e.retry_ = retry;
    return e;
}

std::vector<double> Embedder::embed(const std::string& text) const {
    std::vector<std::string> tokens = tokenize(normalize_text(text));
    if (tokens.empty()) throw EmptyTextError();

    if (!remote_) {
        std::vector<double> v(dim_, 0.0);
        for (const auto& token : tokens) {
            uint64_t h = fnv1a64(token);
            size_t bucket = h % dim_;
            double sign = ((h >> 32) & 1) ? 1.0 : -1.0;
            v[bucket] += sign;
        }
        l2_normalize(v);
        double norm2 = 0.0;
        for (double x : v) norm2 += x * x;
        if (norm2 == 0.0) v[fnv1a64(join(tokens, " ")) % dim_] = 1.0;  // all buckets cancelled
        return v;
    }

    nlohmann::json body{{"input", nlohmann::json::array({text})}, {"model", model_}};
    nlohmann::json response = post_json(endpoint_, body, api_key_, retry_);
    const nlohmann::json* vec = nullptr;
    if (response.contains("data") && response["data"].is_array() && !response["data"].empty() &&
        response["data"][0].contains("embedding")) {
        vec = &response["data"][0]["embedding"];
    } else if (response.contains("embeddings") && response["embeddings"].is_array() &&
               !response["embeddings"].empty()) {
        vec = &response["embeddings"][0];
    }
    if (!vec || !vec->is_array()) throw ProviderError(0, "no embedding in response");
    std::vector<double> v;
    v.reserve(vec->size());
    for (const auto& x : *vec) v.push_back(x.get<double>());
    if (v.size() != dim_) throw DimMismatchError(v.size(), dim_);
    l2_normalize(v);
    return v;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw DimMismatchError(a.size(), b.size());
    double dot = 0.0;
    for (size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
    return dot;
}

}  // namespace flexqa
