#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <openssl/evp.h>

#include "softbound/core/jsonl.hpp"
#include "softbound/expansion/prompt.hpp"

namespace softbound::expansion {

struct CacheEntry {
    std::string key;
    std::string action_text;
    std::string model_id;
    std::string start_desc;
    std::string end_desc;
    std::int64_t created_at = 0;  // unix seconds

    friend bool operator==(const CacheEntry&, const CacheEntry&) = default;
};

inline std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("sha256 failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int k = 0; k < len; ++k) {
        out.push_back(hex[digest[k] >> 4]);
        out.push_back(hex[digest[k] & 0xF]);
    }
    return out;
}

/// Stable content hash of (trimmed action, model, prompt version).
inline std::string cache_key(std::string_view action_text, std::string_view model_id,
                             std::string_view prompt_version = kPromptVersion) {
    std::string material = detail::trim_copy(action_text);
    material += '\x1f';
    material += model_id;
    material += '\x1f';
    material += prompt_version;
    return sha256_hex(material);
}

inline json cache_entry_to_json(const CacheEntry& e) {
    return {{"key", e.key},           {"action_text", e.action_text}, {"model_id", e.model_id},
            {"start_desc", e.start_desc}, {"end_desc", e.end_desc},   {"created_at", e.created_at}};
}

inline CacheEntry cache_entry_from_json(const json& j, std::size_t line_no) {
    CacheEntry e;
    e.key = softbound::detail::field<std::string>(j, "key", line_no);
    e.start_desc = softbound::detail::field<std::string>(j, "start_desc", line_no);
    e.end_desc = softbound::detail::field<std::string>(j, "end_desc", line_no);
    e.action_text = j.value("action_text", std::string{});
    e.model_id = j.value("model_id", std::string{});
    e.created_at = j.value("created_at", std::int64_t{0});
    return e;
}

/// Append-only JSONL cache of expansions. Later lines supersede earlier
/// ones with the same key. Lookups take a shared lock; appends are
/// serialized through a single writer lock.
class ExpansionCache {
public:
    ExpansionCache() = default;

    /// Backs the cache with `path`; existing entries are loaded.
    explicit ExpansionCache(std::filesystem::path path) : path_(std::move(path)) {
        if (std::filesystem::exists(path_)) {
            for_each_jsonl(path_, [&](const json& j, std::size_t line_no) {
                auto e = cache_entry_from_json(j, line_no);
                entries_[e.key] = std::move(e);
                ++lines_;
            });
        }
    }

    std::optional<CacheEntry> find(const std::string& key) const {
        std::shared_lock lock(mutex_);
        const auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        return it->second;
    }

    void put(CacheEntry e) {
        std::unique_lock lock(mutex_);
        if (!path_.empty()) {
            if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
            std::ofstream out(path_, std::ios::app | std::ios::binary);
            if (!out) throw IoError("cannot append to cache " + path_.string());
            out << cache_entry_to_json(e).dump() << '\n';
            if (!out) throw IoError("cache append failed: " + path_.string());
            ++lines_;
        }
        entries_[e.key] = std::move(e);
    }

    std::size_t size() const {
        std::shared_lock lock(mutex_);
        return entries_.size();
    }

    /// Number of lines in the backing file (>= size() until compacted).
    std::size_t line_count() const {
        std::shared_lock lock(mutex_);
        return lines_;
    }

    /// Rewrites the backing file with one line per key, sorted by key.
    void compact() {
        std::unique_lock lock(mutex_);
        if (path_.empty()) return;
        std::vector<const CacheEntry*> sorted;
        sorted.reserve(entries_.size());
        for (const auto& [k, e] : entries_) sorted.push_back(&e);
        std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->key < b->key; });
        std::string body;
        for (const auto* e : sorted) body += cache_entry_to_json(*e).dump() + '\n';
        const auto tmp = path_.string() + ".tmp";
        softbound::detail::write_text_file(tmp, body);
        std::filesystem::rename(tmp, path_);
        lines_ = sorted.size();
    }

    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
    mutable std::shared_mutex mutex_;
    std::unordered_map<std::string, CacheEntry> entries_;
    std::size_t lines_ = 0;
};

inline std::int64_t unix_now() {
    return std::chrono::duration_cast<std::chrono::seconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

}  // namespace softbound::expansion
