#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "softbound/core/types.hpp"

namespace softbound::perturbation {

/// Generator behind every draw; recorded in run reports.
using Engine = std::mt19937_64;
inline constexpr const char* kEngineName = "std::mt19937_64";

inline constexpr int kMaxRedraws = 16;

enum class NoiseKind { none, gaussian, uniform };

inline std::string_view to_string(NoiseKind k) {
    switch (k) {
        case NoiseKind::none: return "none";
        case NoiseKind::gaussian: return "gaussian";
        case NoiseKind::uniform: return "uniform";
    }
    return "?";
}

inline NoiseKind parse_noise_kind(std::string_view s) {
    for (auto k : {NoiseKind::none, NoiseKind::gaussian, NoiseKind::uniform})
        if (to_string(k) == s) return k;
    throw InvariantError("unknown noise kind '" + std::string(s) + "'");
}

/// Relative boundary noise: X, Y are drawn per record and scaled by the
/// annotated length.
struct NoiseSpec {
    NoiseKind kind = NoiseKind::none;
    double sigma = 0.1;
    double lo = -0.5;
    double hi = 0.5;
    std::uint64_t seed = 0;
};

inline void validate(const NoiseSpec& s) {
    if (s.kind == NoiseKind::gaussian && !(s.sigma > 0.0 && std::isfinite(s.sigma)))
        throw InvariantError("gaussian noise needs sigma > 0");
    if (s.kind == NoiseKind::uniform && !(s.lo < s.hi && std::isfinite(s.lo) && std::isfinite(s.hi)))
        throw InvariantError("uniform noise needs lo < hi");
}

/// One relative offset X (or Y) drawn from the configured distribution.
inline double draw_offset(const NoiseSpec& spec, Engine& rng) {
    switch (spec.kind) {
        case NoiseKind::none: return 0.0;
        case NoiseKind::gaussian: return std::normal_distribution<double>(0.0, spec.sigma)(rng);
        case NoiseKind::uniform: return std::uniform_real_distribution<double>(spec.lo, spec.hi)(rng);
    }
    return 0.0;
}

/// start' = start + len * X, end' = end + len * Y, both clamped to
/// [0, duration]. Inverted results are redrawn up to kMaxRedraws times,
/// after which the original segment is returned.
inline Segment perturb_annotation(const Segment& seg, const NoiseSpec& spec, double duration, Engine& rng) {
    validate(spec);
    if (!seg.valid() || seg.start < 0.0 || seg.end > duration)
        throw InvariantError("perturb_annotation: segment must lie inside [0, duration]");
    if (spec.kind == NoiseKind::none) return seg;
    const double len = seg.length();
    for (int attempt = 0; attempt <= kMaxRedraws; ++attempt) {
        const double x = draw_offset(spec, rng);
        const double y = draw_offset(spec, rng);
        const Segment out{std::clamp(seg.start + len * x, 0.0, duration), std::clamp(seg.end + len * y, 0.0, duration)};
        if (out.start < out.end) return out;
    }
    return seg;
}

inline Segment perturb_annotation(const Segment& seg, const NoiseSpec& spec, double duration) {
    Engine rng(spec.seed);
    return perturb_annotation(seg, spec, duration, rng);
}

/// Engine for record `index`: seeded from (seed, index) so every record has
/// its own substream regardless of how records are scheduled.
inline Engine record_engine(std::uint64_t seed, std::size_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(std::uint64_t(index) >> 32)};
    return Engine(seq);
}

inline std::vector<VideoRecord> perturb_dataset(std::vector<VideoRecord> records, const NoiseSpec& spec) {
    validate(spec);
    for (std::size_t k = 0; k < records.size(); ++k) {
        auto rng = record_engine(spec.seed, k);
        records[k].annotation = perturb_annotation(records[k].annotation, spec, records[k].duration_sec, rng);
    }
    return records;
}

}  // namespace softbound::perturbation
