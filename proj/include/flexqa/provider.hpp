#pragma once
// JSON-over-HTTP client with retry/backoff, shared by the translation,
// inherent-reasoning, and embedding remote providers.

#include <string>

#include "json.hpp"

namespace flexqa {

struct RetryPolicy {
    int max_attempts = 3;
    int backoff_ms = 50;  // linear: attempt k sleeps k * backoff_ms
};

// POSTs `body` to `endpoint` (full URL), bearer-authenticated when `api_key`
// is non-empty. Retries connection failures and non-2xx responses; throws
// ProviderError once attempts run out or on an unparseable response body.
nlohmann::json post_json(const std::string& endpoint, const nlohmann::json& body,
                         const std::string& api_key, const RetryPolicy& policy);

}  // namespace flexqa
