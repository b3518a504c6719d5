#include "flexqa/provider.hpp"

#include <chrono>
#include <thread>

#include "flexqa/errors.hpp"
#include "httplib.h"

namespace flexqa {

namespace {

// "http://host:port/path" -> {"http://host:port", "/path"}
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
    size_t scheme = endpoint.find("://");
    size_t path_start = scheme == std::string::npos
                            ? endpoint.find('/')
                            : endpoint.find('/', scheme + 3);
    if (path_start == std::string::npos) return {endpoint, "/"};
    return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

}  // namespace

nlohmann::json post_json(const std::string& endpoint, const nlohmann::json& body,
                         const std::string& api_key, const RetryPolicy& policy) {
    auto [base, path] = split_endpoint(endpoint);
    httplib::Client client(base);
    client.set_connection_timeout(10, 0);
    client.set_read_timeout(60, 0);
    httplib::Headers headers;
    if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);

    const std::string payload = body.dump();
    int last_status = 0;
    std::string last_detail = "connection failed";
    int attempts = policy.max_attempts < 1 ? 1 : policy.max_attempts;
    for (int attempt = 1; attempt <= attempts; ++attempt) {
        auto res = client.Post(path, headers, payload, "application/json");
        if (res && res->status >= 200 && res->status < 300) {
            auto parsed = nlohmann::json::parse(res->body, nullptr, false);
            if (parsed.is_discarded())
                throw ProviderError(res->status, "unparseable response body");
            return parsed;
        }
        if (res) {
            last_status = res->status;
            last_detail = "HTTP " + std::to_string(res->status);
        }
        if (attempt < attempts)
            std::this_thread::sleep_for(std::chrono::milliseconds(
                static_cast<long>(policy.backoff_ms) * attempt));
    }
    throw ProviderError(last_status, last_detail + " after " + std::to_string(attempts) +
                                         " attempts to " + endpoint);
}

}  // namespace flexqa
