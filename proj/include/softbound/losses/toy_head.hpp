#pragma once

#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "softbound/core/matrix.hpp"
#include "softbound/losses/losses.hpp"
#include "softbound/supervision/similarity.hpp"

namespace softbound::losses {

// Stand-in for a base model's boundary predictor:
//   p_hat(i) = logistic(gamma * cos(video_i, mean(query rows)) + beta)
struct ToyHeadParams {
    double gamma = 4.0;
    double beta = 0.0;
};

inline double logistic(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

/// Per-frame cosine between video rows and the pooled query.
inline std::vector<double> head_similarities(const EmbeddingMatrix& video, const EmbeddingMatrix& query) {
    if (video.dim() != query.dim()) throw DimensionError("toy head: video and query dims differ");
    const auto pooled = supervision::pool_query(query);
    std::vector<double> c(video.rows());
    for (std::size_t i = 0; i < video.rows(); ++i) c[i] = supervision::cosine_sim<double>(video.row(i), pooled);
    return c;
}

inline std::vector<double> toy_boundary_head(const EmbeddingMatrix& video, const EmbeddingMatrix& query,
                                             const ToyHeadParams& params) {
    if (!std::isfinite(params.gamma) || !std::isfinite(params.beta))
        throw InvariantError("toy head parameters must be finite");
    auto p = head_similarities(video, query);
    for (auto& v : p) v = logistic(params.gamma * v + params.beta);
    return p;
}

/// Gradient of boundary_loss(p, head(video, query)) with respect to
/// (gamma, beta). Frames whose prediction hits the probability clamp
/// contribute nothing.
inline std::array<double, 2> toy_head_param_grad(std::span<const double> p, const std::vector<double>& similarities,
                                                 const ToyHeadParams& params) {
    if (p.size() != similarities.size()) throw DimensionError("toy head grad: length mismatch");
    std::array<double, 2> g{0.0, 0.0};
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double q = logistic(params.gamma * similarities[i] + params.beta);
        if (q <= kProbEpsilon || q >= 1.0 - kProbEpsilon) continue;
        const double dz = q - p[i];
        g[0] += dz * similarities[i];
        g[1] += dz;
    }
    return g;
}

}  // namespace softbound::losses
