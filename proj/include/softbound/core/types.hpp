#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "softbound/error.hpp"

namespace softbound {

/// Temporal interval, in seconds unless stated otherwise. start < end.
struct Segment {
    double start = 0.0;
    double end = 0.0;

    double length() const noexcept { return end - start; }
    bool valid() const noexcept {
        return std::isfinite(start) && std::isfinite(end) && start < end;
    }
    friend bool operator==(const Segment&, const Segment&) = default;
};

inline Segment make_segment(double start, double end) {
    Segment s{start, end};
    if (!s.valid()) {
        throw InvariantError("invalid segment [" + std::to_string(start) + ", " +
                             std::to_string(end) + "]");
    }
    return s;
}

/// Maps a time in seconds to a feature-row index: clamp(floor(t / stride), 0, T-1).
inline std::size_t frame_of_time(double t, double stride, std::size_t frames) {
    if (frames == 0) return 0;
    const double idx = std::floor(t / stride);
    if (!(idx > 0.0)) return 0;
    const auto last = static_cast<double>(frames - 1);
    return idx >= last ? frames - 1 : static_cast<std::size_t>(idx);
}

/// Number of feature rows for a video: ceil(duration / stride).
inline std::size_t frame_count(double duration_sec, double clip_stride_sec) {
    return static_cast<std::size_t>(std::ceil(duration_sec / clip_stride_sec));
}

struct VideoRecord {
    std::string video_id;
    double duration_sec = 0.0;
    double clip_stride_sec = 2.0;
    Segment annotation;
    std::string query_text;
    std::optional<std::string> embeddings_path;

    std::size_t frames() const { return frame_count(duration_sec, clip_stride_sec); }
    std::size_t start_frame() const { return frame_of_time(annotation.start, clip_stride_sec, frames()); }
    std::size_t end_frame() const { return frame_of_time(annotation.end, clip_stride_sec, frames()); }

    friend bool operator==(const VideoRecord&, const VideoRecord&) = default;
};

/// Throws InvariantError describing the first violated invariant.
inline void validate(const VideoRecord& r) {
    if (r.video_id.empty()) throw InvariantError("video_id is empty");
    if (!(r.duration_sec > 0.0) || !std::isfinite(r.duration_sec))
        throw InvariantError(r.video_id + ": duration_sec must be positive");
    if (!(r.clip_stride_sec > 0.0) || !std::isfinite(r.clip_stride_sec))
        throw InvariantError(r.video_id + ": clip_stride_sec must be positive");
    if (!r.annotation.valid())
        throw InvariantError(r.video_id + ": annotation start must be < end");
    if (r.annotation.start < 0.0 || r.annotation.end > r.duration_sec)
        throw InvariantError(r.video_id + ": annotation outside [0, duration]");
    if (r.frames() < 2) throw InvariantError(r.video_id + ": fewer than 2 frames");
}

/// Original query plus its start/end boundary descriptions.
struct ExpandedQuery {
    std::string original;
    std::string start_desc;
    std::string end_desc;
    std::string source_model;
    bool swapped = false;

    friend bool operator==(const ExpandedQuery&, const ExpandedQuery&) = default;
};

/// Soft per-frame supervision. probs[i] == 1 on [s_prime, e_prime].
struct SupervisionTarget {
    std::string video_id;
    std::size_t s_prime = 0;
    std::size_t e_prime = 0;
    std::vector<double> probs;

    friend bool operator==(const SupervisionTarget&, const SupervisionTarget&) = default;
};

inline void validate(const SupervisionTarget& t) {
    const auto n = t.probs.size();
    if (n == 0) throw InvariantError(t.video_id + ": empty probability vector");
    if (!(t.s_prime <= t.e_prime && t.e_prime < n))
        throw InvariantError(t.video_id + ": require 0 <= s' <= e' <= T-1");
    for (std::size_t i = 0; i < n; ++i) {
        const double p = t.probs[i];
        if (!(p >= 0.0 && p <= 1.0))
            throw InvariantError(t.video_id + ": probs[" + std::to_string(i) + "] outside [0,1]");
        if (i >= t.s_prime && i <= t.e_prime && p != 1.0)
            throw InvariantError(t.video_id + ": probs[" + std::to_string(i) +
                                 "] inside [s', e'] must be 1");
    }
}

}  // namespace softbound
