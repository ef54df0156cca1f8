#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "softbound/core/jsonl.hpp"
#include "softbound/core/types.hpp"

namespace softbound {

inline json target_to_json(const SupervisionTarget& t) {
    json probs = json::array();
    for (double p : t.probs) probs.push_back(text_round(p));
    return {{"video_id", t.video_id}, {"s_prime", t.s_prime}, {"e_prime", t.e_prime}, {"probs", probs}};
}

inline std::string encode_supervision(const std::vector<SupervisionTarget>& targets) {
    std::string body;
    for (const auto& t : targets) {
        validate(t);
        body += target_to_json(t).dump() + '\n';
    }
    return body;
}

/// Validates every target before anything is written.
inline void save_supervision(const std::vector<SupervisionTarget>& targets,
                             const std::filesystem::path& path) {
    detail::write_text_file(path, encode_supervision(targets));
}

inline std::vector<SupervisionTarget> load_supervision(const std::filesystem::path& path) {
    std::vector<SupervisionTarget> out;
    for_each_jsonl(path, [&](const json& j, std::size_t line_no) {
        SupervisionTarget t;
        t.video_id = detail::field<std::string>(j, "video_id", line_no);
        t.s_prime = detail::field<std::size_t>(j, "s_prime", line_no);
        t.e_prime = detail::field<std::size_t>(j, "e_prime", line_no);
        t.probs = detail::field<std::vector<double>>(j, "probs", line_no);
        try {
            validate(t);
        } catch (const InvariantError& e) {
            throw FormatError(path.string() + ": line " + std::to_string(line_no) + ": " + e.what(),
                              line_no);
        }
        out.push_back(std::move(t));
    });
    return out;
}

}  // namespace softbound
