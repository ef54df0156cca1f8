#pragma once

#include <cstdlib>
#include <memory>
#include <string>

#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include "softbound/core/jsonl.hpp"
#include "softbound/expansion/prompt.hpp"

namespace softbound::expansion {

struct ChatRequest {
    std::string model;
    std::string prompt;
    double temperature = 0.0;
    int max_tokens = 128;
};

/// One round trip to a chat-completion model. Implementations throw
/// ExpansionError{network} on transport or HTTP failure.
class LlmClient {
public:
    virtual ~LlmClient() = default;
    virtual std::string complete(const ChatRequest& req) = 0;
};

inline json chat_request_body(const ChatRequest& req) {
    return {{"model", req.model},
            {"messages", json::array({{{"role", "user"}, {"content", req.prompt}}})},
            {"temperature", req.temperature},
            {"max_tokens", req.max_tokens}};
}

/// Reads choices[0].message.content.
inline std::string chat_response_text(const std::string& body) {
    try {
        const auto j = json::parse(body);
        return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw ExpansionError(ExpansionErrorKind::network,
                             std::string("malformed chat response: ") + e.what());
    }
}

/// OpenAI-style chat endpoint over HTTP(S). `base_url` is e.g.
/// "http://localhost:8000/v1"; "/chat/completions" is appended unless the
/// URL already ends with it.
class HttpLlmClient : public LlmClient {
public:
    HttpLlmClient(std::string base_url, std::string api_key, int timeout_sec = 60)
        : api_key_(std::move(api_key)), timeout_sec_(timeout_sec) {
        const auto scheme_end = base_url.find("://");
        const auto path_begin = base_url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
        host_ = base_url.substr(0, path_begin);
        path_ = path_begin == std::string::npos ? std::string{} : base_url.substr(path_begin);
        while (!path_.empty() && path_.back() == '/') path_.pop_back();
        constexpr std::string_view suffix = "/chat/completions";
        if (path_.size() < suffix.size() || path_.compare(path_.size() - suffix.size(), suffix.size(), suffix) != 0)
            path_ += suffix;
    }

    /// Builds a client from LLMX_BASE_URL / LLMX_API_KEY; null when unset.
    static std::unique_ptr<HttpLlmClient> from_environment() {
        const char* url = std::getenv("LLMX_BASE_URL");
        if (!url || !*url) return nullptr;
        const char* key = std::getenv("LLMX_API_KEY");
        return std::make_unique<HttpLlmClient>(url, key ? key : "");
    }

    std::string complete(const ChatRequest& req) override {
        httplib::Client cli(host_);
        cli.set_connection_timeout(timeout_sec_, 0);
        cli.set_read_timeout(timeout_sec_, 0);
        httplib::Headers headers;
        if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
        const auto res = cli.Post(path_, headers, chat_request_body(req).dump(), "application/json");
        if (!res)
            throw ExpansionError(ExpansionErrorKind::network,
                                 "request to " + host_ + path_ + " failed: " + httplib::to_string(res.error()));
        if (res->status < 200 || res->status >= 300)
            throw ExpansionError(ExpansionErrorKind::network,
                                 "request to " + host_ + path_ + " returned HTTP " + std::to_string(res->status));
        return chat_response_text(res->body);
    }

    const std::string& host() const noexcept { return host_; }
    const std::string& path() const noexcept { return path_; }

private:
    std::string host_;
    std::string path_;
    std::string api_key_;
    int timeout_sec_;
};

}  // namespace softbound::expansion
