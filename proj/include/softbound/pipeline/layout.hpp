#pragma once

// On-disk layout shared by the fixture generator and the subcommands.
//   <embeddings_dir>/video/<video_id>.emb   frame features (T x D)
//   <embeddings_dir>/text/<hash>.emb        token features of one text
//   <output_dir>/expansions.jsonl, supervision.jsonl, fused/<video_id>.emb,
//   metrics.json, metrics.csv, perturbed_annotations.jsonl, *_report.json

#include <filesystem>
#include <string>
#include <vector>

#include "softbound/core/jsonl.hpp"
#include "softbound/core/types.hpp"
#include "softbound/expansion/cache.hpp"
#include "softbound/pipeline/config.hpp"

namespace softbound::pipeline {

inline fs::path video_embedding_path(const RunConfig& c, const VideoRecord& r) {
    const auto dir = c.resolve(c.paths.embeddings_dir);
    if (r.embeddings_path) {
        const fs::path p(*r.embeddings_path);
        return p.is_absolute() ? p : dir / p;
    }
    return dir / "video" / (r.video_id + ".emb");
}

inline std::string text_key(const std::string& text) {
    return expansion::sha256_hex(expansion::detail::trim_copy(text)).substr(0, 16);
}

inline fs::path text_embedding_path(const RunConfig& c, const std::string& text) {
    return c.resolve(c.paths.embeddings_dir) / "text" / (text_key(text) + ".emb");
}

inline fs::path expansions_path(const RunConfig& c) { return c.output_dir() / "expansions.jsonl"; }
inline fs::path supervision_path(const RunConfig& c) { return c.output_dir() / "supervision.jsonl"; }

inline json expanded_to_json(const ExpandedQuery& q) {
    return {{"query", q.original},
            {"start_desc", q.start_desc},
            {"end_desc", q.end_desc},
            {"source_model", q.source_model},
            {"swapped", q.swapped}};
}

inline std::vector<ExpandedQuery> load_expansions(const fs::path& path) {
    std::vector<ExpandedQuery> out;
    for_each_jsonl(path, [&](const json& j, std::size_t line_no) {
        ExpandedQuery q;
        q.original = softbound::detail::field<std::string>(j, "query", line_no);
        q.start_desc = softbound::detail::field<std::string>(j, "start_desc", line_no);
        q.end_desc = softbound::detail::field<std::string>(j, "end_desc", line_no);
        q.source_model = j.value("source_model", std::string{});
        q.swapped = j.value("swapped", false);
        if (q.start_desc.empty() || q.end_desc.empty())
            throw FormatError(path.string() + ": line " + std::to_string(line_no) + ": empty description",
                              line_no);
        out.push_back(std::move(q));
    });
    return out;
}

inline void save_expansions(const std::vector<ExpandedQuery>& rows, const fs::path& path) {
    std::string body;
    for (const auto& q : rows) body += expanded_to_json(q).dump() + '\n';
    softbound::detail::write_text_file(path, body);
}

}  // namespace softbound::pipeline
