#pragma once

// Seeded random inputs shared by the unit suites and the acceptance binary.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "softbound/core/matrix.hpp"
#include "softbound/metrics/metrics.hpp"

namespace gen {

using Rng = std::mt19937_64;

inline oracle::Rows rows(Rng& rng, std::size_t n, std::size_t d, double sd = 1.0) {
    std::normal_distribution<double> g(0.0, sd);
    oracle::Rows out(n, std::vector<double>(d));
    for (auto& r : out)
        for (auto& x : r) x = g(rng);
    return out;
}

inline std::vector<double> vec(Rng& rng, std::size_t d) { return rows(rng, 1, d).front(); }

inline softbound::EmbeddingMatrix to_matrix(const oracle::Rows& r) {
    std::vector<double> flat;
    for (const auto& row : r) flat.insert(flat.end(), row.begin(), row.end());
    return softbound::EmbeddingMatrix(r.size(), r.front().size(), std::move(flat));
}

inline oracle::Rows to_rows(const softbound::EmbeddingMatrix& m) {
    oracle::Rows out(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) out[i].assign(m.row(i).begin(), m.row(i).end());
    return out;
}

inline std::size_t uniform_index(Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

/// Frames biased toward the description so that some scores clear tau.
inline oracle::Rows frames_near(Rng& rng, const std::vector<double>& desc, std::size_t frames, double spread) {
    auto out = rows(rng, frames, desc.size(), spread);
    std::uniform_real_distribution<double> w(0.0, 1.0);
    for (auto& r : out) {
        const double k = w(rng);
        for (std::size_t d = 0; d < r.size(); ++d) r[d] += k * desc[d];
    }
    return out;
}

/// Score vector with deliberate ties drawn from a small value alphabet.
inline std::vector<double> tied_scores(Rng& rng, std::size_t n) {
    std::uniform_int_distribution<int> pick(0, 4);
    std::vector<double> out(n);
    for (auto& x : out) x = -1.0 + 0.5 * pick(rng);
    return out;
}

/// A random evaluation set in both library and oracle form. Endpoints sit
/// on a coarse grid and scores on a few levels so that ties and exact
/// threshold hits occur.
struct EvalSet {
    std::vector<softbound::metrics::Prediction> preds;
    softbound::metrics::GroundTruth gt;
    std::vector<oracle::Pred> o_preds;
    std::vector<oracle::Gt> o_gts;
};

inline EvalSet eval_set(Rng& rng, std::size_t videos, std::size_t max_preds, std::size_t max_gts = 1) {
    EvalSet out;
    auto seg = [&] {
        const double a = double(uniform_index(rng, 0, 19)) * 0.5;
        const double b = a + 0.5 * double(uniform_index(rng, 1, 10));
        return softbound::Segment{a, b};
    };
    for (std::size_t v = 0; v < videos; ++v) {
        const std::string vid = "q" + std::to_string(v);
        const auto gts = uniform_index(rng, 1, max_gts);
        for (std::size_t g = 0; g < gts; ++g) {
            const auto s = seg();
            out.gt[vid].push_back(s);
            out.o_gts.push_back({vid, s.start, s.end});
        }
        const auto n = uniform_index(rng, 0, max_preds);
        for (std::size_t k = 0; k < n; ++k) {
            const auto s = seg();
            const double score = 0.1 * double(uniform_index(rng, 0, 6));
            out.preds.push_back({vid, s, score, std::nullopt});
            out.o_preds.push_back({vid, s.start, s.end, score});
        }
    }
    std::shuffle(out.preds.begin(), out.preds.end(), rng);
    out.o_preds.clear();
    for (const auto& p : out.preds) out.o_preds.push_back({p.video_id, p.segment.start, p.segment.end, p.score});
    return out;
}

}  // namespace gen
