#pragma once

// Soft boundary supervision. Each frame gets a score that rewards semantic
// similarity to a boundary description and penalizes temporal distance
// (normalized by the video length T) from a boundary anchor:
//
//     score(i) = cos(frame_i, description) - |i - anchor| / T
//
// Pseudo boundaries s', e' are the argmaxes of this score around the
// annotated anchors. Frames before s' (after e') are then rescored against
// s' (e'), thresholded at tau, and min-max normalized into probabilities;
// the certain region [s', e'] gets probability 1.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "softbound/core/matrix.hpp"
#include "softbound/core/types.hpp"
#include "softbound/supervision/similarity.hpp"

namespace softbound::supervision {

enum class Strategy { paper, gauss, distance_only, similarity_only, original_query };

inline std::string_view to_string(Strategy s) {
    switch (s) {
        case Strategy::paper: return "paper";
        case Strategy::gauss: return "gauss";
        case Strategy::distance_only: return "distance_only";
        case Strategy::similarity_only: return "similarity_only";
        case Strategy::original_query: return "original_query";
    }
    return "?";
}

inline Strategy parse_strategy(std::string_view name) {
    for (auto s : {Strategy::paper, Strategy::gauss, Strategy::distance_only, Strategy::similarity_only,
                   Strategy::original_query})
        if (to_string(s) == name) return s;
    throw InvariantError("unknown supervision strategy '" + std::string(name) + "'");
}

struct SupervisionConfig {
    double tau = 0.8;
    Strategy strategy = Strategy::paper;
    double gauss_sigma = 1.0;  // in frames; gauss strategy only
};

inline void validate(const SupervisionConfig& cfg) {
    if (!(cfg.tau > 0.0) || !std::isfinite(cfg.tau)) throw InvariantError("tau must be positive and finite");
    if (cfg.strategy == Strategy::gauss && !(cfg.gauss_sigma > 0.0))
        throw InvariantError("gauss_sigma must be positive");
}

/// Which terms enter a frame score.
struct ScoreTerms {
    bool similarity = true;
    bool distance = true;
};

inline ScoreTerms terms_for(Strategy s) {
    switch (s) {
        case Strategy::distance_only: return {false, true};
        case Strategy::similarity_only: return {true, false};
        default: return {true, true};
    }
}

struct BoundaryScores {
    std::vector<double> start_scores;
    std::vector<double> end_scores;
};

/// |i - anchor| / T.
inline double normalized_distance(std::size_t i, std::size_t anchor, std::size_t frames) {
    const auto gap = i > anchor ? i - anchor : anchor - i;
    return static_cast<double>(gap) / static_cast<double>(frames);
}

inline double frame_score(const EmbeddingMatrix& video, std::span<const double> description, std::size_t i,
                          std::size_t anchor, ScoreTerms terms = {}) {
    double s = 0.0;
    if (terms.similarity) s += cosine_sim<double>(video.row(i), description);
    if (terms.distance) s -= normalized_distance(i, anchor, video.rows());
    return s;
}

/// Per-frame start and end scores over all T frames.
inline BoundaryScores compute_boundary_scores(const EmbeddingMatrix& video, std::span<const double> start_desc,
                                              std::span<const double> end_desc, std::size_t anchor_s,
                                              std::size_t anchor_e, ScoreTerms terms = {}) {
    const auto frames = video.rows();
    if (anchor_s >= frames || anchor_e >= frames) throw InvariantError("boundary anchor outside [0, T-1]");
    if (start_desc.size() != video.dim() || end_desc.size() != video.dim())
        throw DimensionError("boundary scores: description dim differs from frame dim");
    BoundaryScores out;
    out.start_scores.resize(frames);
    out.end_scores.resize(frames);
    for (std::size_t i = 0; i < frames; ++i) {
        out.start_scores[i] = frame_score(video, start_desc, i, anchor_s, terms);
        out.end_scores[i] = frame_score(video, end_desc, i, anchor_e, terms);
    }
    return out;
}

/// Index of the maximum; earliest on ties.
inline std::size_t argmax_first(std::span<const double> v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

/// Index of the maximum; latest on ties.
inline std::size_t argmax_last(std::span<const double> v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] >= v[best]) best = i;
    return best;
}

struct PseudoBoundaries {
    std::size_t s_prime = 0;
    std::size_t e_prime = 0;
    bool fell_back = false;  // argmaxes crossed; annotated anchors used instead

    friend bool operator==(const PseudoBoundaries&, const PseudoBoundaries&) = default;
};

inline PseudoBoundaries select_pseudo_boundaries(const BoundaryScores& scores, std::size_t anchor_s,
                                                 std::size_t anchor_e) {
    if (scores.start_scores.size() < 2 || scores.start_scores.size() != scores.end_scores.size())
        throw DimensionError("pseudo boundaries need two equal-length score vectors with T >= 2");
    PseudoBoundaries pb{argmax_first(scores.start_scores), argmax_last(scores.end_scores), false};
    if (pb.s_prime > pb.e_prime) pb = {anchor_s, anchor_e, true};
    return pb;
}

/// Zeroes scores below tau, then min-max normalizes the survivors. A lone
/// survivor (max == min) maps to 1.
inline std::vector<double> threshold_and_normalize(std::span<const double> scores, double tau) {
    if (!(tau > 0.0)) throw InvariantError("tau must be positive");
    std::vector<double> p(scores.size(), 0.0);
    std::optional<double> lo, hi;
    for (double s : scores) {
        if (s < tau) continue;
        lo = lo ? std::min(*lo, s) : s;
        hi = hi ? std::max(*hi, s) : s;
    }
    if (!lo) return p;
    const double span = *hi - *lo;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (scores[i] < tau) continue;
        p[i] = span > 0.0 ? (scores[i] - *lo) / span : 1.0;
    }
    return p;
}

/// Probabilities for frames i < s_prime (result has s_prime entries).
inline std::vector<double> probability_before_start(const EmbeddingMatrix& video, std::span<const double> start_desc,
                                                    std::size_t s_prime, double tau, ScoreTerms terms = {}) {
    if (s_prime >= video.rows()) throw InvariantError("s' outside [0, T-1]");
    std::vector<double> scores(s_prime);
    for (std::size_t i = 0; i < s_prime; ++i) scores[i] = frame_score(video, start_desc, i, s_prime, terms);
    return threshold_and_normalize(scores, tau);
}

/// Probabilities for frames i > e_prime (result has T - 1 - e_prime entries;
/// element k belongs to frame e_prime + 1 + k).
inline std::vector<double> probability_after_end(const EmbeddingMatrix& video, std::span<const double> end_desc,
                                                 std::size_t e_prime, double tau, ScoreTerms terms = {}) {
    if (e_prime >= video.rows()) throw InvariantError("e' outside [0, T-1]");
    std::vector<double> scores(video.rows() - 1 - e_prime);
    for (std::size_t k = 0; k < scores.size(); ++k)
        scores[k] = frame_score(video, end_desc, e_prime + 1 + k, e_prime, terms);
    return threshold_and_normalize(scores, tau);
}

/// Piecewise probability vector: p_s before s', 1 on [s', e'], p_e after e'.
inline std::vector<double> assemble_probability(std::span<const double> p_start, std::span<const double> p_end,
                                                std::size_t s_prime, std::size_t e_prime, std::size_t frames) {
    if (!(s_prime <= e_prime && e_prime < frames)) throw InvariantError("require 0 <= s' <= e' <= T-1");
    if (p_start.size() != s_prime || p_end.size() != frames - 1 - e_prime)
        throw InvariantError("probability pieces do not match s', e' and T");
    std::vector<double> probs(frames, 1.0);
    std::copy(p_start.begin(), p_start.end(), probs.begin());
    std::copy(p_end.begin(), p_end.end(), probs.begin() + static_cast<std::ptrdiff_t>(e_prime + 1));
    return probs;
}

/// Token features of the original query and its two boundary descriptions.
struct QueryEmbeddings {
    EmbeddingMatrix query;
    EmbeddingMatrix start;
    EmbeddingMatrix end;
};

/// Gaussian decay exp(-(i - b)^2 / (2 sigma^2)) away from the nearest
/// annotated boundary frame b; 1 inside the annotation.
inline std::vector<double> gaussian_ramp(std::size_t anchor_s, std::size_t anchor_e, std::size_t frames,
                                         double sigma) {
    std::vector<double> probs(frames, 1.0);
    for (std::size_t i = 0; i < frames; ++i) {
        if (i >= anchor_s && i <= anchor_e) continue;
        const double d = i < anchor_s ? double(anchor_s - i) : double(i - anchor_e);
        probs[i] = std::exp(-d * d / (2.0 * sigma * sigma));
    }
    return probs;
}

/// Full supervision for one video. T is the number of rows in `video`; the
/// annotation is mapped onto frames with frame_of_time().
inline SupervisionTarget generate_supervision(const VideoRecord& record, const EmbeddingMatrix& video,
                                              const QueryEmbeddings& text, const SupervisionConfig& cfg) {
    validate(cfg);
    const auto frames = video.rows();
    if (frames < 2) throw InvariantError(record.video_id + ": need at least 2 frames");
    const auto anchor_s = frame_of_time(record.annotation.start, record.clip_stride_sec, frames);
    const auto anchor_e = frame_of_time(record.annotation.end, record.clip_stride_sec, frames);

    SupervisionTarget t;
    t.video_id = record.video_id;
    if (cfg.strategy == Strategy::gauss) {
        t.s_prime = anchor_s;
        t.e_prime = anchor_e;
        t.probs = gaussian_ramp(anchor_s, anchor_e, frames, cfg.gauss_sigma);
        return t;
    }

    const bool use_original = cfg.strategy == Strategy::original_query;
    const auto& start_tokens = use_original ? text.query : text.start;
    const auto& end_tokens = use_original ? text.query : text.end;
    if (start_tokens.empty() || end_tokens.empty())
        throw InvariantError(record.video_id + ": missing query embeddings");
    const auto start_desc = pool_query(start_tokens);
    const auto end_desc = pool_query(end_tokens);
    const auto terms = terms_for(cfg.strategy);

    const auto scores = compute_boundary_scores(video, start_desc, end_desc, anchor_s, anchor_e, terms);
    const auto pb = select_pseudo_boundaries(scores, anchor_s, anchor_e);
    const auto p_s = probability_before_start(video, start_desc, pb.s_prime, cfg.tau, terms);
    const auto p_e = probability_after_end(video, end_desc, pb.e_prime, cfg.tau, terms);
    t.s_prime = pb.s_prime;
    t.e_prime = pb.e_prime;
    t.probs = assemble_probability(p_s, p_e, pb.s_prime, pb.e_prime, frames);
    return t;
}

}  // namespace softbound::supervision
