#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "softbound/core/jsonl.hpp"
#include "softbound/core/types.hpp"

namespace softbound {

inline VideoRecord record_from_json(const json& j, std::size_t line_no) {
    VideoRecord r;
    r.video_id = detail::field<std::string>(j, "video_id", line_no);
    r.query_text = detail::field<std::string>(j, "query", line_no);
    r.annotation.start = detail::field<double>(j, "start_sec", line_no);
    r.annotation.end = detail::field<double>(j, "end_sec", line_no);
    r.duration_sec = detail::field<double>(j, "duration_sec", line_no);
    r.clip_stride_sec = detail::field<double>(j, "clip_stride_sec", line_no);
    if (auto it = j.find("embeddings_path"); it != j.end() && it->is_string())
        r.embeddings_path = it->get<std::string>();
    return r;
}

inline json record_to_json(const VideoRecord& r) {
    json j = {{"video_id", r.video_id},
              {"query", r.query_text},
              {"start_sec", text_round(r.annotation.start)},
              {"end_sec", text_round(r.annotation.end)},
              {"duration_sec", text_round(r.duration_sec)},
              {"clip_stride_sec", text_round(r.clip_stride_sec)}};
    if (r.embeddings_path) j["embeddings_path"] = *r.embeddings_path;
    return j;
}

/// Reads annotation JSONL. Invalid lines are fatal under Strictness::fatal,
/// otherwise reported through warn() and skipped. A line carrying a
/// "_provenance" key (written by the perturb command) is ignored.
inline std::vector<VideoRecord> load_annotations(const std::filesystem::path& path,
                                                 Strictness strictness = Strictness::fatal) {
    std::vector<VideoRecord> out;
    for_each_jsonl(path, [&](const json& j, std::size_t line_no) {
        if (j.contains("_provenance")) return;
        try {
            auto r = record_from_json(j, line_no);
            validate(r);
            out.push_back(std::move(r));
        } catch (const Error& e) {
            const std::string msg = path.string() + ": line " + std::to_string(line_no) + ": " + e.what();
            if (strictness == Strictness::fatal) throw InvariantError(msg);
            warn(msg + " (skipped)");
        }
    });
    if (out.empty()) warn(path.string() + ": no annotation records");
    return out;
}

/// Writes records as JSONL; `header`, when non-null, becomes the first line.
inline void save_annotations(const std::vector<VideoRecord>& records, const std::filesystem::path& path,
                             const json* header = nullptr) {
    std::string body;
    if (header) body += header->dump() + '\n';
    for (const auto& r : records) {
        validate(r);
        body += record_to_json(r).dump() + '\n';
    }
    detail::write_text_file(path, body);
}

}  // namespace softbound
