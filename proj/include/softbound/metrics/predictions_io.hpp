#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "softbound/core/jsonl.hpp"
#include "softbound/metrics/metrics.hpp"

namespace softbound::metrics {

/// Reads predictions JSONL: video_id, start_sec, end_sec, score, optional rank.
inline std::vector<Prediction> load_predictions(const std::filesystem::path& path,
                                                Strictness strictness = Strictness::lenient) {
    std::vector<Prediction> out;
    for_each_jsonl(path, [&](const json& j, std::size_t line_no) {
        try {
            Prediction p;
            p.video_id = softbound::detail::field<std::string>(j, "video_id", line_no);
            p.segment.start = softbound::detail::field<double>(j, "start_sec", line_no);
            p.segment.end = softbound::detail::field<double>(j, "end_sec", line_no);
            p.score = softbound::detail::field<double>(j, "score", line_no);
            if (auto it = j.find("rank"); it != j.end()) p.rank = softbound::detail::field<int>(j, "rank", line_no);
            if (!p.segment.valid() || !std::isfinite(p.score))
                throw FormatError("line " + std::to_string(line_no) + ": invalid segment or score", line_no);
            out.push_back(std::move(p));
        } catch (const FormatError& e) {
            const std::string msg = path.string() + ": " + e.what();
            if (strictness == Strictness::fatal) throw FormatError(msg, line_no);
            warn(msg + " (skipped)");
        }
    });
    return out;
}

inline void save_predictions(const std::vector<Prediction>& preds, const std::filesystem::path& path) {
    std::string body;
    for (const auto& p : preds) {
        json j = {{"video_id", p.video_id},
                  {"start_sec", text_round(p.segment.start)},
                  {"end_sec", text_round(p.segment.end)},
                  {"score", text_round(p.score)}};
        if (p.rank) j["rank"] = *p.rank;
        body += j.dump() + '\n';
    }
    softbound::detail::write_text_file(path, body);
}

inline json report_to_json(const MetricReport& rep) {
    auto key = [](double mu) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%.2f", mu);
        return std::string(buf);
    };
    json r1 = json::object(), ap = json::object();
    for (const auto& [mu, v] : rep.r1_at) r1[key(mu)] = text_round(v);
    for (const auto& [mu, v] : rep.per_threshold_ap) ap[key(mu)] = text_round(v);
    return {{"r1_at", r1}, {"ap_at", ap}, {"map", text_round(rep.map_mean)}};
}

/// Flat "metric,threshold,value" rows.
inline std::string report_to_csv(const MetricReport& rep) {
    std::string out = "metric,threshold,value\n";
    char buf[96];
    for (const auto& [mu, v] : rep.r1_at) {
        std::snprintf(buf, sizeof buf, "r1,%.2f,%.9g\n", mu, v);
        out += buf;
    }
    for (const auto& [mu, v] : rep.per_threshold_ap) {
        std::snprintf(buf, sizeof buf, "ap,%.2f,%.9g\n", mu, v);
        out += buf;
    }
    std::snprintf(buf, sizeof buf, "map,,%.9g\n", rep.map_mean);
    out += buf;
    return out;
}

}  // namespace softbound::metrics
