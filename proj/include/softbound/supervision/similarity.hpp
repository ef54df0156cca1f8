#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "softbound/core/matrix.hpp"

namespace softbound::supervision {

/// Cosine similarity clamped to [-1, 1]. A zero-norm operand yields 0 and a
/// warning.
template <typename Scalar>
Scalar cosine_sim(std::span<const Scalar> x, std::span<const Scalar> y) {
    if (x.size() != y.size())
        throw DimensionError("cosine_sim: lengths " + std::to_string(x.size()) + " and " +
                             std::to_string(y.size()));
    Scalar dot{0}, xx{0}, yy{0};
    for (std::size_t d = 0; d < x.size(); ++d) {
        dot += x[d] * y[d];
        xx += x[d] * x[d];
        yy += y[d] * y[d];
    }
    if (xx == Scalar{0} || yy == Scalar{0}) {
        warn("cosine_sim: zero-norm embedding, similarity taken as 0");
        return Scalar{0};
    }
    return std::clamp(dot / (std::sqrt(xx) * std::sqrt(yy)), Scalar{-1}, Scalar{1});
}

inline double cosine_sim(const std::vector<double>& x, const std::vector<double>& y) {
    return cosine_sim<double>(std::span<const double>(x), std::span<const double>(y));
}

/// Mean of the token rows.
template <typename Scalar>
std::vector<Scalar> pool_query(const BasicMatrix<Scalar>& tokens) {
    if (tokens.rows() == 0 || tokens.dim() == 0) throw DimensionError("pool_query: empty token matrix");
    std::vector<Scalar> out(tokens.dim(), Scalar{0});
    for (std::size_t n = 0; n < tokens.rows(); ++n) {
        const auto r = tokens.row(n);
        for (std::size_t d = 0; d < out.size(); ++d) out[d] += r[d];
    }
    for (auto& v : out) v /= static_cast<Scalar>(tokens.rows());
    return out;
}

}  // namespace softbound::supervision
