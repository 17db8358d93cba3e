#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "graphblocks/harness.hpp"

namespace graphblocks {

namespace {

struct SplitUrl {
    std::string origin;  // scheme://host[:port]
    std::string path;    // leading prefix, no trailing slash
};

SplitUrl split_url(const std::string& base_url) {
    auto scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos)
        fail(DiagCode::TransportError, "base url needs a scheme: " + base_url);
    auto path_start = base_url.find('/', scheme_end + 3);
    SplitUrl out;
    if (path_start == std::string::npos) {
        out.origin = base_url;
    } else {
        out.origin = base_url.substr(0, path_start);
        out.path = base_url.substr(path_start);
    }
    while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
    return out;
}

std::string body_snippet(const std::string& body) {
    if (body.size() <= 200) return body;
    return body.substr(0, 200) + "...";
}

}  // namespace

EndpointConfig endpoint_from_env() {
    EndpointConfig cfg;
    if (const char* key = std::getenv("GRAPHBLOCKS_API_KEY")) cfg.api_key = key;
    if (const char* url = std::getenv("GRAPHBLOCKS_BASE_URL")) cfg.base_url = url;
    if (const char* model = std::getenv("GRAPHBLOCKS_MODEL")) cfg.model = model;
    return cfg;
}

std::string strip_reasoning(const std::string& content) {
    std::string out = content;
    while (true) {
        auto open = out.find("<think>");
        if (open == std::string::npos) break;
        auto close = out.find("</think>", open);
        if (close == std::string::npos) break;
        out.erase(open, close + 8 - open);
    }
    return out;
}

std::string request_hash(const std::string& system_prompt, const std::string& user_prompt) {
    // FNV-1a, 64-bit; the 0x1f separator keeps (a+b, c) and (a, b+c) apart.
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
    };
    mix(system_prompt);
    h ^= 0x1f;
    h *= 1099511628211ull;
    mix(user_prompt);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

std::string query_model(const EndpointConfig& cfg, const std::string& system_prompt,
                        const std::string& user_prompt) {
    if (cfg.api_key.empty())
        fail(DiagCode::AuthError, "no API key configured (set GRAPHBLOCKS_API_KEY)");

    SplitUrl url = split_url(cfg.base_url);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (url.origin.rfind("https://", 0) == 0)
        fail(DiagCode::TransportError,
             "this build has no TLS support; use an http:// endpoint");
#endif

    nlohmann::json body;
    body["model"] = cfg.model;
    body["messages"] = nlohmann::json::array({
        nlohmann::json{{"role", "system"}, {"content", system_prompt}},
        nlohmann::json{{"role", "user"}, {"content", user_prompt}},
    });
    body["temperature"] = cfg.temperature;
    body["top_p"] = cfg.top_p;
    body["max_completion_tokens"] = cfg.max_completion_tokens;
    if (!cfg.reasoning_effort.empty()) body["reasoning_effort"] = cfg.reasoning_effort;
    std::string payload = body.dump();

    std::string last_transport_error = "request not attempted";
    bool rate_limited = false;
    for (int attempt = 1; attempt <= cfg.max_attempts; ++attempt) {
        if (attempt > 1) {
            long long delay = cfg.backoff_base_ms;
            for (int i = 2; i < attempt; ++i) delay *= 2;
            std::this_thread::sleep_for(std::chrono::milliseconds(delay));
        }

        httplib::Client client(url.origin);
        client.set_connection_timeout(cfg.timeout_seconds, 0);
        client.set_read_timeout(cfg.timeout_seconds, 0);
        client.set_bearer_token_auth(cfg.api_key);

        auto res = client.Post(url.path + "/chat/completions", payload, "application/json");
        if (!res) {
            last_transport_error = httplib::to_string(res.error());
            continue;
        }
        if (res->status == 401 || res->status == 403)
            fail(DiagCode::AuthError,
                 "endpoint rejected the API key (HTTP " + std::to_string(res->status) + ")");
        if (res->status == 429) {
            rate_limited = true;
            last_transport_error = "HTTP 429";
            continue;
        }
        if (res->status >= 500) {
            last_transport_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200)
            fail(DiagCode::TransportError, "HTTP " + std::to_string(res->status) + ": " +
                                               body_snippet(res->body));

        nlohmann::json reply;
        try {
            reply = nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::parse_error&) {
            fail(DiagCode::TransportError,
                 "endpoint returned unparseable JSON: " + body_snippet(res->body));
        }
        if (!reply.contains("choices") || !reply["choices"].is_array() ||
            reply["choices"].empty())
            fail(DiagCode::EmptyResponse, "no choices in response");
        const auto& message = reply["choices"][0].value("message", nlohmann::json::object());
        std::string content = message.value("content", std::string());
        content = strip_reasoning(content);
        if (content.find_first_not_of(" \t\r\n") == std::string::npos)
            fail(DiagCode::EmptyResponse, "model returned an empty message");
        return content;
    }
    if (rate_limited)
        fail(DiagCode::RateLimited,
             "rate limited after " + std::to_string(cfg.max_attempts) + " attempts");
    fail(DiagCode::TransportError, "request failed after " + std::to_string(cfg.max_attempts) +
                                       " attempts: " + last_transport_error);
}

}  // namespace graphblocks
