#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "softbound/core/matrix.hpp"

namespace softbound::fusion {

template <typename Scalar>
Scalar default_scale(std::size_t dim) {
    return Scalar{1} / std::sqrt(static_cast<Scalar>(dim));
}

/// Row-wise softmax(scale * Q K^T), max-subtracted. Shape T x N.
template <typename Scalar>
BasicMatrix<Scalar> attention_weights(const BasicMatrix<Scalar>& queries, const BasicMatrix<Scalar>& keys,
                                      Scalar scale) {
    if (queries.dim() != keys.dim())
        throw DimensionError("attention: query dim " + std::to_string(queries.dim()) + " != key dim " +
                             std::to_string(keys.dim()));
    if (keys.rows() == 0) throw DimensionError("attention: no key rows");
    BasicMatrix<Scalar> w(queries.rows(), keys.rows());
    for (std::size_t i = 0; i < queries.rows(); ++i) {
        const auto q = queries.row(i);
        auto out = w.row(i);
        for (std::size_t n = 0; n < keys.rows(); ++n) {
            const auto k = keys.row(n);
            Scalar dot{0};
            for (std::size_t d = 0; d < q.size(); ++d) dot += q[d] * k[d];
            out[n] = scale * dot;
        }
        const Scalar peak = *std::max_element(out.begin(), out.end());
        Scalar total{0};
        for (auto& v : out) {
            v = std::exp(v - peak);
            total += v;
        }
        for (auto& v : out) v /= total;
    }
    return w;
}

/// Single-head scaled dot-product attention with identity projections:
/// row i of the result is softmax(scale * q_i K^T) V.
template <typename Scalar>
BasicMatrix<Scalar> cross_attention(const BasicMatrix<Scalar>& queries, const BasicMatrix<Scalar>& keys,
                                    const BasicMatrix<Scalar>& values, Scalar scale) {
    if (keys.rows() != values.rows())
        throw DimensionError("attention: " + std::to_string(keys.rows()) + " keys but " +
                             std::to_string(values.rows()) + " values");
    if (values.dim() != queries.dim()) throw DimensionError("attention: value dim differs from query dim");
    const auto w = attention_weights(queries, keys, scale);
    BasicMatrix<Scalar> out(queries.rows(), values.dim());
    for (std::size_t i = 0; i < queries.rows(); ++i) {
        auto o = out.row(i);
        for (std::size_t n = 0; n < values.rows(); ++n) {
            const Scalar a = w(i, n);
            const auto v = values.row(n);
            for (std::size_t d = 0; d < o.size(); ++d) o[d] += a * v[d];
        }
    }
    return out;
}

template <typename Scalar>
BasicMatrix<Scalar> matmul(const BasicMatrix<Scalar>& x, const BasicMatrix<Scalar>& w) {
    if (x.dim() != w.rows()) throw DimensionError("matmul: inner dimensions differ");
    BasicMatrix<Scalar> out(x.rows(), w.dim());
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t k = 0; k < x.dim(); ++k) {
            const Scalar a = x(i, k);
            for (std::size_t j = 0; j < w.dim(); ++j) out(i, j) += a * w(k, j);
        }
    return out;
}

/// Optional D x D projections applied to queries, keys and values before
/// attention. Missing entries act as the identity.
template <typename Scalar>
struct AttentionProjections {
    std::optional<BasicMatrix<Scalar>> query;
    std::optional<BasicMatrix<Scalar>> key;
    std::optional<BasicMatrix<Scalar>> value;

    bool identity() const noexcept { return !query && !key && !value; }
};

template <typename Scalar>
BasicMatrix<Scalar> cross_attention(const BasicMatrix<Scalar>& queries, const BasicMatrix<Scalar>& keys,
                                    const BasicMatrix<Scalar>& values, Scalar scale,
                                    const AttentionProjections<Scalar>& proj) {
    if (proj.identity()) return cross_attention(queries, keys, values, scale);
    auto apply = [](const BasicMatrix<Scalar>& x, const std::optional<BasicMatrix<Scalar>>& w) {
        return w ? matmul(x, *w) : x;
    };
    return cross_attention(apply(queries, proj.query), apply(keys, proj.key), apply(values, proj.value), scale);
}

}  // namespace softbound::fusion
