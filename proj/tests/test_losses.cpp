#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "oracles.hpp"
#include "softbound/losses/grad_check.hpp"
#include "softbound/losses/losses.hpp"
#include "softbound/losses/toy_head.hpp"

using namespace softbound;
using namespace softbound::losses;

namespace {

CenterWidth cw_from(double s, double e) { return {(s + e) / 2.0, e - s}; }

CenterWidth random_cw(gen::Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    if (b - a < 1e-3) b = std::min(1.0, a + 1e-3);
    return cw_from(a, b);
}

std::vector<double> uniform_vec(gen::Rng& rng, std::size_t n, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

}  // namespace

TEST(Giou, Examples) {
    EXPECT_NEAR(giou_1d(cw_from(0.1, 0.4), cw_from(0.1, 0.4)), 1.0, 1e-12);
    EXPECT_NEAR(giou_1d(cw_from(0.0, 0.2), cw_from(0.8, 1.0)), -0.6, 1e-12);
    EXPECT_NEAR(giou_1d(cw_from(0.0, 0.5), cw_from(0.5, 1.0)), 0.0, 1e-12);
    EXPECT_THROW(giou_1d({0.5, 0.0}, {0.5, 0.1}), InvariantError);
}

TEST(Giou, SymmetricBoundedAndMatchesOracle) {
    gen::Rng rng(1);
    for (int k = 0; k < 1000; ++k) {
        const auto a = random_cw(rng), b = random_cw(rng);
        const double g = giou_1d(a, b);
        EXPECT_NEAR(g, giou_1d(b, a), 1e-12);
        EXPECT_GT(g, -1.0);
        EXPECT_LE(g, 1.0 + 1e-12);
        EXPECT_NEAR(g, oracle::giou(a.start(), a.end(), b.start(), b.end()), 1e-12);
        // nested segments: union equals hull, so gIoU equals IoU
        const CenterWidth inner{a.center, a.width / 2};
        EXPECT_NEAR(giou_1d(a, inner), oracle::iou(a.start(), a.end(), inner.start(), inner.end()), 1e-12);
    }
}

TEST(CenterWidthConversion, RoundTrip) {
    const Segment s{3.0, 9.0};
    const auto m = to_center_width(s, 30.0);
    EXPECT_DOUBLE_EQ(m.center, 0.2);
    EXPECT_DOUBLE_EQ(m.width, 0.2);
    const auto back = to_segment(m, 30.0);
    EXPECT_NEAR(back.start, 3.0, 1e-12);
    EXPECT_NEAR(back.end, 9.0, 1e-12);
}

TEST(MomentLoss, Examples) {
    const LossWeights w;
    const auto m = cw_from(0.2, 0.6);
    EXPECT_NEAR(moment_loss(m, m, w), 0.0, 1e-12);
    LossWeights no_l1;
    no_l1.lambda_l1 = 0.0;
    const auto h = cw_from(0.5, 0.9);
    EXPECT_NEAR(moment_loss(m, h, no_l1), no_l1.lambda_iou * (1.0 - giou_1d(m, h)), 1e-12);
}

TEST(MomentLoss, MatchesCompositionOracle) {
    gen::Rng rng(2);
    std::uniform_real_distribution<double> lam(0.0, 5.0);
    for (int k = 0; k < 500; ++k) {
        LossWeights w;
        w.lambda_l1 = lam(rng);
        w.lambda_iou = lam(rng);
        const auto a = random_cw(rng), b = random_cw(rng);
        const double want = w.lambda_l1 * (std::abs(a.center - b.center) + std::abs(a.width - b.width)) +
                            w.lambda_iou * (1.0 - oracle::giou(a.start(), a.end(), b.start(), b.end()));
        const double got = moment_loss(a, b, w);
        EXPECT_NEAR(got, want, 1e-12);
        EXPECT_GE(got, 0.0);
    }
}

TEST(SaliencyLoss, Examples) {
    const std::vector<double> eq(6, 0.3);
    EXPECT_NEAR(saliency_loss(eq, 0, 1, 2, 3, 0.2), 0.4, 1e-12);
    EXPECT_EQ(saliency_loss(eq, 0, 1, 2, 3, 0.0), 0.0);
    const std::vector<double> s{0.9, 0.1, 0.8, 0.2};
    EXPECT_EQ(saliency_loss(s, 0, 1, 2, 3, 0.2), 0.0);
    EXPECT_THROW(saliency_loss(s, 0, 1, 2, 4, 0.2), InvariantError);
}

TEST(ToyHead, Examples) {
    const EmbeddingMatrix video{{0.6, 0.8}, {-0.6, -0.8}, {0.8, -0.6}};
    const EmbeddingMatrix query{{0.6, 0.8}};
    const auto p = toy_boundary_head(video, query, {4.0, 0.0});
    EXPECT_NEAR(p[0], oracle::logistic(4.0), 1e-12);
    EXPECT_NEAR(p[0], 0.9820, 1e-4);
    EXPECT_NEAR(p[1], 0.0180, 1e-4);
    EXPECT_NEAR(p[0] + p[1], 1.0, 1e-12);
    const auto flat = toy_boundary_head(video, query, {0.0, 0.0});
    for (double x : flat) EXPECT_EQ(x, 0.5);
    EXPECT_THROW(toy_boundary_head(video, EmbeddingMatrix{{1.0}}, {}), DimensionError);
}

TEST(BoundaryLoss, Examples) {
    const std::vector<double> half(4, 0.5);
    EXPECT_NEAR(boundary_loss(half, half), 4.0 * std::log(2.0), 1e-9);
    const std::vector<double> ones(5, 1.0), near_one(5, 1.0 - kProbEpsilon);
    EXPECT_LE(boundary_loss(ones, near_one), 5 * 2e-7);
    EXPECT_LE(boundary_loss(ones, ones), 5 * 2e-7);  // clamped, still finite
    EXPECT_THROW(boundary_loss(half, ones), DimensionError);
}

TEST(BoundaryLoss, MatchesOracleAndMinimizedAtTarget) {
    gen::Rng rng(3);
    std::normal_distribution<double> jitter(0.0, 0.05);
    for (int k = 0; k < 300; ++k) {
        const auto T = gen::uniform_index(rng, 1, 20);
        const auto p = uniform_vec(rng, T, 0.0, 1.0);
        const auto q = uniform_vec(rng, T, 0.01, 0.99);
        double want = 0;
        for (std::size_t i = 0; i < T; ++i) want += oracle::bce(p[i], q[i]);
        EXPECT_NEAR(boundary_loss(p, q), want, 1e-9);

        auto pc = p;
        for (auto& x : pc) x = std::clamp(x, 0.02, 0.98);
        auto moved = pc;
        for (auto& x : moved) x = std::clamp(x + jitter(rng), 0.01, 0.99);
        EXPECT_GE(boundary_loss(pc, moved), boundary_loss(pc, pc) - 1e-12);
    }
}

TEST(OriginLoss, ComposesWeightedTerms) {
    const LossWeights w;
    const auto target = cw_from(0.2, 0.5);
    const std::vector<MatchedMoment> perfect{{true, 1.0, target, target}};
    EXPECT_NEAR(origin_loss(nullptr, perfect, w), 0.0, 1e-6);
    EXPECT_NEAR(total_loss(0.0, origin_loss(nullptr, perfect, w)), 0.0, 1e-6);
    EXPECT_EQ(total_loss(1.25, 0.0), 1.25);

    gen::Rng rng(4);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    for (int k = 0; k < 200; ++k) {
        LossWeights lw;
        lw.lambda_l1 = u(rng) * 10;
        lw.lambda_iou = u(rng);
        lw.lambda_saliency = u(rng);
        lw.lambda_cls = u(rng) * 4;
        lw.margin_delta = u(rng) / 2;
        SaliencyPairs sp{uniform_vec(rng, 6, -1.0, 1.0), 0, 1, 2, 3};
        std::vector<MatchedMoment> moments;
        double want = lw.lambda_saliency * (std::max(0.0, lw.margin_delta + sp.scores[1] - sp.scores[0]) +
                                            std::max(0.0, lw.margin_delta + sp.scores[3] - sp.scores[2]));
        for (int m = 0; m < 3; ++m) {
            MatchedMoment mm{m != 2, u(rng), random_cw(rng), random_cw(rng)};
            want += -lw.lambda_cls * std::log(mm.class_prob);
            if (mm.foreground)
                want += lw.lambda_l1 * (std::abs(mm.target.center - mm.predicted.center) +
                                        std::abs(mm.target.width - mm.predicted.width)) +
                        lw.lambda_iou * (1.0 - oracle::giou(mm.target.start(), mm.target.end(),
                                                            mm.predicted.start(), mm.predicted.end()));
            moments.push_back(mm);
        }
        const double bound = u(rng);
        EXPECT_NEAR(total_loss(bound, origin_loss(&sp, moments, lw)), bound + want, 1e-9);
    }
    EXPECT_THROW(total_loss(std::nan(""), 0.0), InvariantError);
    LossWeights bad;
    bad.lambda_cls = -1.0;
    EXPECT_THROW(validate(bad), InvariantError);
}

TEST(GradCheck, QuadraticIsExact) {
    gen::Rng rng(5);
    const auto x = gen::vec(rng, 6);
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = 2 * x[i];
    const auto r = grad_check(
        [](std::span<const double> v) {
            double s = 0;
            for (double a : v) s += a * a;
            return s;
        },
        x, g, 1e-5);
    EXPECT_LT(r.max_relative_error, 1e-6);
    EXPECT_THROW(grad_check([](std::span<const double>) { return 0.0; }, x, g, 0.0), InvariantError);
}

TEST(GradCheck, DetectsWrongGradient) {
    const std::vector<double> x{1.0, 2.0};
    const std::vector<double> wrong{2.0, 0.0};
    const auto r = grad_check([](std::span<const double> v) { return v[0] * v[0] + v[1] * v[1]; }, x, wrong, 1e-5);
    EXPECT_GT(r.max_relative_error, 0.5);
    EXPECT_EQ(r.worst_coordinate, 1u);
}

TEST(GradCheck, BoundaryLossWrtPredictions) {
    gen::Rng rng(6);
    for (int k = 0; k < 100; ++k) {
        const auto T = gen::uniform_index(rng, 1, 16);
        const auto p = uniform_vec(rng, T, 0.0, 1.0);
        const auto q = uniform_vec(rng, T, 0.02, 0.98);
        const auto r = grad_check([&](std::span<const double> x) { return boundary_loss(p, x); }, q,
                                  boundary_loss_grad(p, q), 1e-6);
        EXPECT_LT(r.max_relative_error, 1e-4) << "point " << k;
    }
}

TEST(GradCheck, ToyHeadParameters) {
    gen::Rng rng(7);
    std::uniform_real_distribution<double> gamma(-5.0, 5.0), beta(-1.0, 1.0);
    for (int k = 0; k < 100; ++k) {
        const auto T = gen::uniform_index(rng, 2, 16), D = gen::uniform_index(rng, 2, 6);
        const auto video = gen::to_matrix(gen::rows(rng, T, D));
        const auto query = gen::to_matrix(gen::rows(rng, 2, D));
        const auto p = uniform_vec(rng, T, 0.0, 1.0);
        const ToyHeadParams params{gamma(rng), beta(rng)};
        const auto sims = head_similarities(video, query);
        const auto analytic = toy_head_param_grad(p, sims, params);
        const std::vector<double> point{params.gamma, params.beta};
        const auto r = grad_check(
            [&](std::span<const double> x) { return boundary_loss(p, toy_boundary_head(video, query, {x[0], x[1]})); },
            point, analytic, 1e-6);
        EXPECT_LT(r.max_relative_error, 1e-4) << "point " << k;
    }
}
