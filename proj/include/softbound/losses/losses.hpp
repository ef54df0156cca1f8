#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "softbound/core/matrix.hpp"
#include "softbound/core/types.hpp"
#include "softbound/supervision/similarity.hpp"

namespace softbound::losses {

/// Normalized moment in (center, width) form, both in [0, 1] units of video length.
struct CenterWidth {
    double center = 0.0;
    double width = 0.0;

    double start() const noexcept { return center - 0.5 * width; }
    double end() const noexcept { return center + 0.5 * width; }
    friend bool operator==(const CenterWidth&, const CenterWidth&) = default;
};

inline CenterWidth to_center_width(const Segment& s, double duration) {
    return {(s.start + s.end) / (2.0 * duration), (s.end - s.start) / duration};
}

inline Segment to_segment(const CenterWidth& m, double duration) {
    return {m.start() * duration, m.end() * duration};
}

struct LossWeights {
    double lambda_l1 = 10.0;
    double lambda_iou = 1.0;
    double lambda_saliency = 1.0;
    double lambda_cls = 4.0;
    double margin_delta = 0.2;
};

inline void validate(const LossWeights& w) {
    for (double v : {w.lambda_l1, w.lambda_iou, w.lambda_saliency, w.lambda_cls})
        if (!std::isfinite(v) || v < 0.0) throw InvariantError("loss weights must be finite and >= 0");
    if (!std::isfinite(w.margin_delta)) throw InvariantError("margin_delta must be finite");
}

/// Generalized IoU of two 1-D intervals: IoU - (hull - union) / hull.
inline double giou_1d(const CenterWidth& m, const CenterWidth& m_hat) {
    if (!(m.width > 0.0) || !(m_hat.width > 0.0)) throw InvariantError("giou_1d: widths must be positive");
    const double inter = std::max(0.0, std::min(m.end(), m_hat.end()) - std::max(m.start(), m_hat.start()));
    const double uni = m.width + m_hat.width - inter;
    const double hull = std::max(m.end(), m_hat.end()) - std::min(m.start(), m_hat.start());
    return inter / uni - (hull - uni) / hull;
}

/// lambda_l1 * (|dc| + |dw|) + lambda_iou * (1 - gIoU).
inline double moment_loss(const CenterWidth& m, const CenterWidth& m_hat, const LossWeights& w) {
    const double l1 = std::abs(m.center - m_hat.center) + std::abs(m.width - m_hat.width);
    return w.lambda_l1 * l1 + w.lambda_iou * (1.0 - giou_1d(m, m_hat));
}

/// Two hinge ranking terms with margin delta.
inline double saliency_loss(std::span<const double> saliency, std::size_t t_high, std::size_t t_low,
                            std::size_t t_in, std::size_t t_out, double delta) {
    const auto n = saliency.size();
    if (t_high >= n || t_low >= n || t_in >= n || t_out >= n)
        throw InvariantError("saliency_loss: clip index out of range");
    return std::max(0.0, delta + saliency[t_low] - saliency[t_high]) +
           std::max(0.0, delta + saliency[t_out] - saliency[t_in]);
}

inline constexpr double kProbEpsilon = 1e-7;

inline double clamp_prob(double p) { return std::clamp(p, kProbEpsilon, 1.0 - kProbEpsilon); }

/// Sum over frames of binary cross-entropy with soft targets p.
inline double boundary_loss(std::span<const double> p, std::span<const double> p_hat) {
    if (p.size() != p_hat.size())
        throw DimensionError("boundary_loss: " + std::to_string(p.size()) + " targets vs " +
                             std::to_string(p_hat.size()) + " predictions");
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double q = clamp_prob(p_hat[i]);
        total -= p[i] * std::log(q) + (1.0 - p[i]) * std::log(1.0 - q);
    }
    return total;
}

/// d boundary_loss / d p_hat. Zero where the clamp is active.
inline std::vector<double> boundary_loss_grad(std::span<const double> p, std::span<const double> p_hat) {
    if (p.size() != p_hat.size()) throw DimensionError("boundary_loss_grad: length mismatch");
    std::vector<double> g(p.size(), 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double q = p_hat[i];
        if (q <= kProbEpsilon || q >= 1.0 - kProbEpsilon) continue;
        g[i] = -p[i] / q + (1.0 - p[i]) / (1.0 - q);
    }
    return g;
}

/// One decoder slot already paired with its ground truth. `foreground`
/// selects whether the moment term applies; `class_prob` is the predicted
/// probability of the slot's assigned class.
struct MatchedMoment {
    bool foreground = true;
    double class_prob = 1.0;
    CenterWidth target;
    CenterWidth predicted;
};

struct SaliencyPairs {
    std::vector<double> scores;
    std::size_t t_high = 0, t_low = 0, t_in = 0, t_out = 0;
};

/// Base-model objective: lambda_saliency * saliency + sum over slots of
/// (-lambda_cls * ln p(c) + [foreground] * moment_loss).
inline double origin_loss(const SaliencyPairs* saliency, std::span<const MatchedMoment> moments,
                          const LossWeights& w) {
    validate(w);
    double total = 0.0;
    if (saliency)
        total += w.lambda_saliency * saliency_loss(saliency->scores, saliency->t_high, saliency->t_low,
                                                   saliency->t_in, saliency->t_out, w.margin_delta);
    for (const auto& m : moments) {
        total += -w.lambda_cls * std::log(clamp_prob(m.class_prob));
        if (m.foreground) total += moment_loss(m.target, m.predicted, w);
    }
    return total;
}

inline double total_loss(double bound, double origin) {
    if (!std::isfinite(bound) || !std::isfinite(origin)) throw InvariantError("total_loss: non-finite component");
    return bound + origin;
}

}  // namespace softbound::losses
