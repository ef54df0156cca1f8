#pragma once

// Synthetic dataset generator for offline demos and tests.
//
// Axis 0 carries the start description, axis 1 the end description and
// (axis0 + axis1) the action body / original query. Per video:
//   frame k_s          = axis 0                 (planted start)
//   frame k_e          = axis 1                 (planted end)
//   (k_s, k_e)         ~ body direction
//   a few frames before k_s / after k_e lean toward axis 0 / axis 1
//   everything else    ~ -(axis0 + axis1)
// Annotations are anchored at k_s or k_s+1 (start) and k_e or k_e-1 (end),
// which keeps the planted frames the unique score maxima.

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "softbound/core/annotations.hpp"
#include "softbound/core/embedding_io.hpp"
#include "softbound/expansion/cache.hpp"
#include "softbound/metrics/predictions_io.hpp"
#include "softbound/pipeline/config.hpp"
#include "softbound/pipeline/layout.hpp"

namespace softbound::pipeline {

struct FixtureSpec {
    std::size_t videos = 4;
    std::size_t frames = 16;
    std::size_t dim = 8;
    std::uint64_t seed = 0;
    double stride_sec = 2.0;
};

struct PlantedVideo {
    std::string video_id;
    std::size_t start_frame = 0;
    std::size_t end_frame = 0;
};

struct FixtureInfo {
    fs::path config_path;
    std::vector<PlantedVideo> videos;
};

namespace detail {

inline constexpr std::array<double, 4> kLean{0.995, 0.98, 0.96, 0.93};
inline constexpr double kNoise = 0.05;

inline std::vector<double> direction(std::size_t dim, double x0, double x1) {
    std::vector<double> v(dim, 0.0);
    v[0] = x0;
    v[1] = x1;
    return v;
}

inline void add_noise(std::vector<double>& v, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, kNoise);
    for (std::size_t d = 2; d < v.size(); ++d) v[d] += n(rng);
}

inline void normalize(std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    s = std::sqrt(s);
    for (double& x : v) x /= s;
}

inline EmbeddingMatrix token_matrix(const std::vector<double>& dir, std::size_t tokens, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<double> data;
    for (std::size_t n = 0; n < tokens; ++n) {
        auto row = dir;
        add_noise(row, rng);
        normalize(row);
        data.insert(data.end(), row.begin(), row.end());
    }
    return EmbeddingMatrix(tokens, dir.size(), std::move(data));
}

inline std::uint64_t text_seed(const std::string& text) {
    return std::stoull(text_key(text), nullptr, 16);
}

}  // namespace detail

inline void validate(const FixtureSpec& s) {
    if (s.videos < 1) throw InvariantError("fixture needs at least one video");
    if (s.frames < 4) throw InvariantError("fixture needs T >= 4");
    if (s.dim < 2) throw InvariantError("fixture needs D >= 2");
    if (!(s.stride_sec > 0.0)) throw InvariantError("fixture stride must be positive");
}

/// Writes a complete dataset under `dir`: config.ini, annotations.jsonl,
/// embeddings/, expansion_cache.jsonl (warm for every query) and
/// predictions.jsonl. Output is a pure function of `spec`.
inline FixtureInfo write_fixture(const fs::path& dir, const FixtureSpec& spec) {
    validate(spec);
    fs::create_directories(dir);

    RunConfig cfg;
    cfg.base_dir = dir;
    cfg.seed = spec.seed;
    cfg.noise.seed = spec.seed;
    cfg.paths.predictions = "predictions.jsonl";
    cfg.llm.offline = true;
    fs::create_directories(cfg.resolve(cfg.paths.embeddings_dir) / "video");
    fs::create_directories(cfg.resolve(cfg.paths.embeddings_dir) / "text");

    static const std::array<const char*, 6> verbs{"opens", "closes", "picks up", "puts down", "holds", "washes"};
    static const std::array<const char*, 5> objects{"the door", "a cup", "a sandwich", "the laptop", "a book"};

    std::mt19937_64 rng(spec.seed);
    const auto T = spec.frames;
    const auto D = spec.dim;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

    FixtureInfo info;
    info.config_path = dir / "config.ini";
    std::vector<VideoRecord> records;
    std::vector<metrics::Prediction> preds;
    std::set<std::string> written_texts;
    if (fs::exists(cfg.resolve(cfg.paths.cache))) fs::remove(cfg.resolve(cfg.paths.cache));
    expansion::ExpansionCache cache(cfg.resolve(cfg.paths.cache));

    auto write_text = [&](const std::string& text, const std::vector<double>& dir_vec) {
        if (!written_texts.insert(text).second) return;
        save_embeddings(detail::token_matrix(dir_vec, 3, detail::text_seed(text)), text_embedding_path(cfg, text));
    };

    for (std::size_t v = 0; v < spec.videos; ++v) {
        char id[32];
        std::snprintf(id, sizeof id, "vid%04zu", v);
        const std::string query = std::string("person ") + verbs[rng() % verbs.size()] + " " +
                                  objects[rng() % objects.size()];

        const std::size_t ks_hi = std::max<std::size_t>(1, T / 3);
        const std::size_t ks = 1 + rng() % ks_hi;
        const std::size_t ke_lo = std::max(ks + 1, (2 * T) / 3 - 1);
        const std::size_t ke = ke_lo + rng() % (T - 1 - ke_lo);  // in [ke_lo, T-2]

        std::vector<double> data;
        data.reserve(T * D);
        for (std::size_t i = 0; i < T; ++i) {
            std::vector<double> f;
            if (i == ks) {
                f = detail::direction(D, 1.0, 0.0);
            } else if (i == ke) {
                f = detail::direction(D, 0.0, 1.0);
            } else if (i > ks && i < ke) {
                f = detail::direction(D, inv_sqrt2, inv_sqrt2);
                detail::add_noise(f, rng);
            } else if (i < ks && ks - i <= detail::kLean.size()) {
                const double c = detail::kLean[ks - i - 1];
                f = detail::direction(D, c, -std::sqrt(1.0 - c * c));
            } else if (i > ke && i - ke <= detail::kLean.size()) {
                const double c = detail::kLean[i - ke - 1];
                f = detail::direction(D, -std::sqrt(1.0 - c * c), c);
            } else {
                f = detail::direction(D, -inv_sqrt2, -inv_sqrt2);
                detail::add_noise(f, rng);
            }
            detail::normalize(f);
            data.insert(data.end(), f.begin(), f.end());
        }

        std::size_t anchor_s = ks + rng() % 2;
        std::size_t anchor_e = ke - rng() % 2;
        if (anchor_s > anchor_e) anchor_e = anchor_s;

        VideoRecord r;
        r.video_id = id;
        r.query_text = query;
        r.clip_stride_sec = spec.stride_sec;
        r.duration_sec = double(T) * spec.stride_sec;
        r.annotation = {(double(anchor_s) + 0.25) * spec.stride_sec, (double(anchor_e) + 0.5) * spec.stride_sec};
        records.push_back(r);
        save_embeddings(EmbeddingMatrix(T, D, std::move(data)), video_embedding_path(cfg, r));

        const std::string start_desc = "The person starts to " + query.substr(7) + ", hands moving into place.";
        const std::string end_desc = "The person finishes and " + query.substr(7) + " is left at rest.";
        write_text(query, detail::direction(D, inv_sqrt2, inv_sqrt2));
        write_text(start_desc, detail::direction(D, 1.0, 0.0));
        write_text(end_desc, detail::direction(D, 0.0, 1.0));
        const auto key = expansion::cache_key(query, cfg.llm.model_id);
        if (!cache.find(key)) cache.put({key, query, cfg.llm.model_id, start_desc, end_desc, 0});

        const double len = r.annotation.length();
        const double dur = r.duration_sec;
        std::uniform_real_distribution<double> jitter(-0.15, 0.15);
        auto clamp_seg = [&](double s, double e) {
            s = std::clamp(s, 0.0, dur);
            e = std::clamp(e, 0.0, dur);
            if (e <= s) e = std::min(dur, s + spec.stride_sec);
            if (e <= s) s = e - spec.stride_sec;
            return Segment{s, e};
        };
        preds.push_back({id, clamp_seg(r.annotation.start + len * jitter(rng), r.annotation.end + len * jitter(rng)),
                         0.9, std::nullopt});
        preds.push_back({id, clamp_seg(r.annotation.start + 0.5 * len, r.annotation.end + 0.5 * len), 0.5,
                         std::nullopt});
        preds.push_back({id, clamp_seg(0.0, spec.stride_sec), 0.1, std::nullopt});
        info.videos.push_back({id, ks, ke});
    }

    save_annotations(records, cfg.resolve(cfg.paths.annotations));
    metrics::save_predictions(preds, cfg.resolve(cfg.paths.predictions));
    softbound::detail::write_text_file(info.config_path, config_to_ini(cfg));

    json manifest = json::array();
    for (const auto& p : info.videos)
        manifest.push_back({{"video_id", p.video_id}, {"start_frame", p.start_frame}, {"end_frame", p.end_frame}});
    softbound::detail::write_text_file(dir / "fixture_manifest.json", manifest.dump(2) + "\n");
    return info;
}

}  // namespace softbound::pipeline
