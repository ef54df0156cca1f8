#pragma once

#include <atomic>
#include <chrono>
#include <future>
#include <mutex>
#include <string>
#include <thread>
#include <unordered_map>

#include "softbound/core/types.hpp"
#include "softbound/expansion/cache.hpp"
#include "softbound/expansion/llm_client.hpp"
#include "softbound/expansion/prompt.hpp"

namespace softbound::expansion {

inline constexpr const char* kDefaultModel = "llama3-8b";

struct ExpansionRequest {
    std::string action_text;
    std::string model_id = kDefaultModel;
    double temperature = 0.0;
    int max_tokens = 128;
};

inline void validate(const ExpansionRequest& r) {
    if (detail::trim_copy(r.action_text).empty())
        throw ExpansionError(ExpansionErrorKind::empty_action, "empty action text");
    if (!(r.temperature >= 0.0 && r.temperature <= 2.0))
        throw InvariantError("temperature must lie in [0, 2]");
    if (r.max_tokens <= 0) throw InvariantError("max_tokens must be positive");
}

struct ExpanderOptions {
    bool offline = false;
    int network_attempts = 3;  // per prompt, with exponential backoff
    int reprompts = 2;         // extra prompts after an unparseable reply
    std::chrono::milliseconds initial_backoff{250};
    std::string prompt_version = kPromptVersion;
};

/// Resolves expansions through the cache first and the LLM second. Safe to
/// call from several threads; concurrent requests for the same key share
/// one network round trip.
class QueryExpander {
public:
    QueryExpander(ExpansionCache& cache, LlmClient* client, ExpanderOptions opts = {})
        : cache_(cache), client_(client), opts_(std::move(opts)) {}

    ExpandedQuery expand(const ExpansionRequest& req) {
        validate(req);
        const auto action = detail::trim_copy(req.action_text);
        const auto key = cache_key(action, req.model_id, opts_.prompt_version);
        if (auto hit = cache_.find(key)) {
            ++hits_;
            return to_query(action, req.model_id, *hit);
        }

        std::shared_future<CacheEntry> pending;
        std::promise<CacheEntry> promise;
        bool owner = false;
        {
            std::lock_guard lock(inflight_mutex_);
            // Re-check under the lock: an owner inserts into the cache
            // before leaving the in-flight table.
            if (auto hit = cache_.find(key)) {
                ++hits_;
                return to_query(action, req.model_id, *hit);
            }
            if (auto it = inflight_.find(key); it != inflight_.end()) {
                pending = it->second;
            } else {
                pending = promise.get_future().share();
                inflight_.emplace(key, pending);
                owner = true;
            }
        }

        if (!owner) {
            ++hits_;
            return to_query(action, req.model_id, pending.get());
        }

        ++misses_;
        try {
            auto entry = fetch(action, key, req);
            cache_.put(entry);
            promise.set_value(entry);
            release(key);
            return to_query(action, req.model_id, entry);
        } catch (...) {
            promise.set_exception(std::current_exception());
            release(key);
            throw;
        }
    }

    std::size_t network_calls() const noexcept { return calls_.load(); }
    std::size_t cache_hits() const noexcept { return hits_.load(); }
    std::size_t cache_misses() const noexcept { return misses_.load(); }

private:
    static ExpandedQuery to_query(const std::string& action, const std::string& model, const CacheEntry& e) {
        return {action, e.start_desc, e.end_desc, e.model_id.empty() ? model : e.model_id, false};
    }

    void release(const std::string& key) {
        std::lock_guard lock(inflight_mutex_);
        inflight_.erase(key);
    }

    std::string call_with_retry(const ChatRequest& chat) {
        auto backoff = opts_.initial_backoff;
        for (int attempt = 1;; ++attempt) {
            try {
                ++calls_;
                return client_->complete(chat);
            } catch (const ExpansionError& e) {
                if (e.kind() != ExpansionErrorKind::network || attempt >= opts_.network_attempts) throw;
            }
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
    }

    CacheEntry fetch(const std::string& action, const std::string& key, const ExpansionRequest& req) {
        if (opts_.offline || client_ == nullptr)
            throw ExpansionError(ExpansionErrorKind::offline_miss,
                                 "no cached expansion for '" + action + "' and no LLM available");
        const ChatRequest chat{req.model_id, build_prompt(action), req.temperature, req.max_tokens};
        for (int round = 0;; ++round) {
            const auto reply = call_with_retry(chat);
            try {
                auto [start, end] = parse_expansion(reply);
                return {key, action, req.model_id, std::move(start), std::move(end), unix_now()};
            } catch (const ExpansionError& e) {
                if (round >= opts_.reprompts)
                    throw ExpansionError(ExpansionErrorKind::unparseable,
                                         "'" + action + "': " + e.what());
            }
        }
    }

    ExpansionCache& cache_;
    LlmClient* client_;
    ExpanderOptions opts_;
    std::mutex inflight_mutex_;
    std::unordered_map<std::string, std::shared_future<CacheEntry>> inflight_;
    std::atomic<std::size_t> calls_{0};
    std::atomic<std::size_t> hits_{0};
    std::atomic<std::size_t> misses_{0};
};

/// Free-function form: one request against a cache and an optional client.
inline ExpandedQuery expand_query(const ExpansionRequest& req, ExpansionCache& cache, LlmClient* client,
                                  const ExpanderOptions& opts = {}) {
    QueryExpander expander(cache, client, opts);
    return expander.expand(req);
}

}  // namespace softbound::expansion
