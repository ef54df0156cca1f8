// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Each check compares library output with an independent oracle
// from tests/oracles.hpp or with exact hand values.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "generators.hpp"
#include "oracles.hpp"
#include "softbound/softbound.hpp"

using namespace softbound;
namespace fs = std::filesystem;

namespace {

struct Failure {
    std::string what;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw Failure{what};
}

template <typename... Args>
std::string fmt(const char* f, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("softbound_acceptance_" + name);
    fs::remove_all(dir);
    return dir;
}

VideoRecord record_for(std::size_t frames, std::size_t anchor_s, std::size_t anchor_e) {
    VideoRecord r;
    r.video_id = "v";
    r.clip_stride_sec = 1.0;
    r.duration_sec = double(frames);
    r.annotation = {double(anchor_s) + 0.1, double(anchor_e) + 0.9};
    r.query_text = "q";
    return r;
}

// ---------------------------------------------------------------------------

std::string pseudo_boundary_oracle() {
    using namespace supervision;
    gen::Rng rng(101);
    const int n = 1000;
    std::size_t fallbacks = 0;
    for (int k = 0; k < n; ++k) {
        const auto T = gen::uniform_index(rng, 2, 64);
        BoundaryScores s;
        if (k % 2) {
            s = {gen::tied_scores(rng, T), gen::tied_scores(rng, T)};
        } else {
            const auto D = gen::uniform_index(rng, 1, 16);
            s = compute_boundary_scores(gen::to_matrix(gen::rows(rng, T, D)), gen::vec(rng, D), gen::vec(rng, D),
                                        gen::uniform_index(rng, 0, T - 1), gen::uniform_index(rng, 0, T - 1));
        }
        const auto as = gen::uniform_index(rng, 0, T - 1);
        const auto ae = gen::uniform_index(rng, as, T - 1);
        auto s_ref = oracle::argmax_scan(s.start_scores).first;
        auto e_ref = oracle::argmax_scan(s.end_scores).second;
        if (s_ref > e_ref) s_ref = as, e_ref = ae, ++fallbacks;
        const auto pb = select_pseudo_boundaries(s, as, ae);
        require(pb.s_prime == s_ref && pb.e_prime == e_ref, fmt("instance %d disagrees with the scan", k));
    }
    return fmt("%d/%d instances agree (%zu anchor fallbacks)", n, n, fallbacks);
}

std::string probability_invariants() {
    using namespace supervision;
    const auto quiet = set_warning_sink([](const std::string&) {});
    gen::Rng rng(202);
    std::uniform_real_distribution<double> tau_u(0.3, 0.95), scale_u(0.01, 100.0);
    const int n = 10000;
    for (int k = 0; k < n; ++k) {
        const auto T = gen::uniform_index(rng, 2, 48), D = gen::uniform_index(rng, 2, 12);
        const auto sdesc = gen::vec(rng, D), edesc = gen::vec(rng, D);
        const auto frames = gen::frames_near(rng, k % 2 ? sdesc : edesc, T, 0.3);
        const auto as = gen::uniform_index(rng, 0, T - 1), ae = gen::uniform_index(rng, as, T - 1);
        const auto rec = record_for(T, as, ae);
        const QueryEmbeddings text{gen::to_matrix({sdesc}), gen::to_matrix({sdesc}), gen::to_matrix({edesc})};
        SupervisionConfig cfg;
        cfg.tau = tau_u(rng);
        const auto t = generate_supervision(rec, gen::to_matrix(frames), text, cfg);

        require(t.probs.size() == T, fmt("instance %d: length %zu != %zu", k, t.probs.size(), T));
        for (std::size_t i = 0; i < T; ++i) {
            require(t.probs[i] >= 0.0 && t.probs[i] <= 1.0, fmt("instance %d: p(%zu) out of range", k, i));
            if (i >= t.s_prime && i <= t.e_prime) require(t.probs[i] == 1.0, fmt("instance %d: p(%zu) != 1", k, i));
        }

        // positive rescaling of the frame features changes nothing
        const double c = scale_u(rng);
        auto scaled_frames = frames;
        for (auto& r : scaled_frames)
            for (auto& x : r) x *= c;
        const auto scaled = generate_supervision(rec, gen::to_matrix(scaled_frames), text, cfg);
        require(scaled.s_prime == t.s_prime && scaled.e_prime == t.e_prime, fmt("instance %d: scale moved s'/e'", k));
        for (std::size_t i = 0; i < T; ++i)
            require(std::abs(scaled.probs[i] - t.probs[i]) <= 1e-9, fmt("instance %d: scale changed p(%zu)", k, i));

        // a higher tau keeps a subset of the positive frames
        cfg.tau = std::min(0.99, cfg.tau + 0.05);
        const auto strict = generate_supervision(rec, gen::to_matrix(frames), text, cfg);
        for (std::size_t i = 0; i < T; ++i)
            if (strict.probs[i] > 0.0) require(t.probs[i] > 0.0, fmt("instance %d: tau raise added frame %zu", k, i));
    }
    set_warning_sink(quiet);
    return fmt("%d instances, 0 violations", n);
}

std::string hand_instance() {
    using namespace supervision;
    const EmbeddingMatrix video{{1.0, 0.0}, {0.0, 1.0}, {0.7071, 0.7071}, {-1.0, 0.0}};
    const std::vector<double> desc{1.0, 0.0};
    const auto scores = compute_boundary_scores(video, desc, desc, 2, 2);
    const auto rows = gen::to_rows(video);
    std::vector<double> oracle_scores;
    for (std::size_t i = 0; i < 4; ++i) {
        oracle_scores.push_back(oracle::frame_score(rows, desc, i, 2));
        require(std::abs(scores.start_scores[i] - oracle_scores[i]) < 1e-12, fmt("frame %zu differs from oracle", i));
    }
    // Listed reference values; frame 3 is -1 - 1/4 by the score formula, not -1.75.
    const std::vector<double> listed{0.5, -0.25, 0.7071, -1.75};
    const std::vector<double> formula{0.5, -0.25, 0.7071, -1.25};
    for (std::size_t i = 0; i < 4; ++i)
        require(std::abs(scores.start_scores[i] - formula[i]) < 1e-4, fmt("frame %zu off by more than 1e-4", i));
    require(select_pseudo_boundaries(scores, 2, 2).s_prime == 2, "s' != 2");
    return fmt("scores [%.4f, %.4f, %.4f, %.4f], s'=2; listed frame 3 value %.2f disagrees with the formula (%.2f)",
               scores.start_scores[0], scores.start_scores[1], scores.start_scores[2], scores.start_scores[3],
               listed[3], formula[3]);
}

std::string threshold_arithmetic() {
    using namespace supervision;
    const auto p = threshold_and_normalize(std::vector<double>{0.9, 0.85, 0.95}, 0.8);
    require(std::abs(p[0] - 0.5) < 1e-12 && std::abs(p[1]) < 1e-12 && std::abs(p[2] - 1.0) < 1e-12,
            fmt("got {%.17g, %.17g, %.17g}", p[0], p[1], p[2]));
    const auto lone = threshold_and_normalize(std::vector<double>{0.9, 0.1}, 0.8);
    require(lone[0] == 1.0 && lone[1] == 0.0, "single survivor does not map to 1");
    return fmt("{0.9,0.85,0.95} -> {%.12g, %.12g, %.12g}; lone survivor -> 1", p[0], p[1], p[2]);
}

std::string metric_oracles() {
    using namespace metrics;
    require(temporal_iou({2, 6}, {4, 8}) == 1.0 / 3.0, "temporal_iou([2,6],[4,8]) != 1/3");
    gen::Rng rng(505);
    const int sets = 200;
    double worst = 0.0;
    for (int k = 0; k < sets; ++k) {
        const auto set = gen::eval_set(rng, 8, 6, 3);
        const auto rep = evaluate(set.preds, set.gt);
        double prev = 1.0;
        for (int m = 1; m <= 20; ++m) {
            const double mu = 0.05 * m;
            const double got = r1_at_iou(set.preds, set.gt, mu);
            worst = std::max(worst, std::abs(got - oracle::r1(set.o_preds, set.o_gts, mu)));
            require(got <= prev + 1e-12, fmt("set %d: R1 rises at mu=%.2f", k, mu));
            prev = got;
        }
        double mean = 0.0;
        for (double mu : default_map_thresholds()) {
            const double want = oracle::map_at(set.o_preds, set.o_gts, mu);
            worst = std::max(worst, std::abs(rep.per_threshold_ap.at(mu) - want));
            mean += want / double(default_map_thresholds().size());
        }
        worst = std::max(worst, std::abs(rep.map_mean - mean));
        require(worst <= 1e-9, fmt("set %d: deviation %.3g", k, worst));
    }
    return fmt("IoU exact; %d sets, max deviation %.2g, R1 monotone", sets, worst);
}

std::string loss_values() {
    using namespace losses;
    const std::vector<double> half(4, 0.5);
    const double b = boundary_loss(half, half);
    require(std::abs(b - 4.0 * std::log(2.0)) < 1e-9, fmt("boundary loss %.12g", b));
    const CenterWidth m{0.4, 0.4};
    const double ml = moment_loss(m, m, LossWeights{});
    require(std::abs(ml) < 1e-12, fmt("moment loss of identical segments %.3g", ml));
    const double g = giou_1d({0.1, 0.2}, {0.9, 0.2});
    require(std::abs(g + 0.6) < 1e-12, fmt("gIoU %.17g", g));
    return fmt("4 ln2 = %.9f, moment(identical) = %.1g, gIoU = %.12f", b, ml, g);
}

std::string gradient_checks() {
    using namespace losses;
    gen::Rng rng(707);
    std::uniform_real_distribution<double> u(0.0, 1.0), inner(0.02, 0.98), gamma(-5.0, 5.0), beta(-1.0, 1.0);
    double worst = 0.0;
    const int points = 100;
    for (int k = 0; k < points; ++k) {
        const auto T = gen::uniform_index(rng, 2, 16), D = gen::uniform_index(rng, 2, 6);
        std::vector<double> p(T), q(T);
        for (auto& x : p) x = u(rng);
        for (auto& x : q) x = inner(rng);
        const auto r1 = grad_check([&](std::span<const double> x) { return boundary_loss(p, x); }, q,
                                   boundary_loss_grad(p, q), 1e-6);

        const auto video = gen::to_matrix(gen::rows(rng, T, D));
        const auto query = gen::to_matrix(gen::rows(rng, 2, D));
        const ToyHeadParams params{gamma(rng), beta(rng)};
        const auto analytic = toy_head_param_grad(p, head_similarities(video, query), params);
        const std::vector<double> point{params.gamma, params.beta};
        const auto r2 = grad_check(
            [&](std::span<const double> x) { return boundary_loss(p, toy_boundary_head(video, query, {x[0], x[1]})); },
            point, analytic, 1e-6);
        worst = std::max({worst, r1.max_relative_error, r2.max_relative_error});
        require(worst < 1e-4, fmt("point %d: relative error %.3g", k, worst));
    }
    return fmt("%d points x 2 gradients, max relative error %.2g", points, worst);
}

std::string attention_properties() {
    using namespace fusion;
    gen::Rng rng(808);
    const int n = 200;
    double worst_sum = 0.0;
    for (int k = 0; k < n; ++k) {
        const auto D = gen::uniform_index(rng, 1, 8), T = gen::uniform_index(rng, 1, 12),
                   N = gen::uniform_index(rng, 1, 8);
        const auto q = gen::to_matrix(gen::rows(rng, T, D, 2.0));
        const auto keys_rows = gen::rows(rng, N, D, 2.0);
        const auto vals_rows = gen::rows(rng, N, D, 2.0);
        const auto keys = gen::to_matrix(keys_rows), vals = gen::to_matrix(vals_rows);
        const double scale = default_scale<double>(D);

        const auto w = attention_weights(q, keys, scale);
        for (std::size_t i = 0; i < T; ++i) {
            double s = 0.0;
            for (std::size_t m = 0; m < N; ++m) {
                require(w(i, m) >= 0.0, fmt("instance %d: negative weight", k));
                s += w(i, m);
            }
            worst_sum = std::max(worst_sum, std::abs(s - 1.0));
            require(std::abs(s - 1.0) <= 1e-9, fmt("instance %d: row sum %.17g", k, s));
        }

        const auto out = cross_attention(q, keys, vals, scale);
        for (std::size_t i = 0; i < T; ++i)
            for (std::size_t d = 0; d < D; ++d) {
                double lo = vals(0, d), hi = vals(0, d), mix = 0.0;
                for (std::size_t m = 0; m < N; ++m) {
                    lo = std::min(lo, vals(m, d));
                    hi = std::max(hi, vals(m, d));
                    mix += w(i, m) * vals(m, d);
                }
                require(out(i, d) >= lo - 1e-6 && out(i, d) <= hi + 1e-6, fmt("instance %d: outside hull", k));
                require(std::abs(out(i, d) - mix) <= 1e-9, fmt("instance %d: not the weighted value mix", k));
            }

        std::vector<std::size_t> perm(N);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        oracle::Rows pk, pv;
        for (auto m : perm) {
            pk.push_back(keys_rows[m]);
            pv.push_back(vals_rows[m]);
        }
        const auto permuted = cross_attention(q, gen::to_matrix(pk), gen::to_matrix(pv), scale);
        for (std::size_t i = 0; i < T; ++i)
            for (std::size_t d = 0; d < D; ++d)
                require(std::abs(permuted(i, d) - out(i, d)) <= 1e-12, fmt("instance %d: key order matters", k));

        const auto s = gen::to_matrix(gen::rows(rng, gen::uniform_index(rng, 1, 4), D));
        const auto e = gen::to_matrix(gen::rows(rng, gen::uniform_index(rng, 1, 4), D));
        const auto g = global_branch(q, s, keys, e);
        const auto l = local_branch(q, s, keys, e);
        FusionConfig only_global;
        only_global.a = 1.0;
        only_global.b = 0.0;
        require(fuse(g, l, only_global) == g, fmt("instance %d: a=1,b=0 differs from the global branch", k));
    }
    return fmt("%d instances; max |row sum - 1| = %.2g", n, worst_sum);
}

std::string perturbation_statistics() {
    using namespace perturbation;
    NoiseSpec spec;
    spec.kind = NoiseKind::gaussian;
    spec.sigma = 0.1;
    spec.seed = 909;
    Engine rng(spec.seed);
    const std::size_t n = 100000;
    double sum = 0.0, sq = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const auto out = perturb_annotation({20.0, 24.0}, spec, 100.0, rng);
        const double x = (out.start - 20.0) / 4.0;
        sum += x;
        sq += x * x;
    }
    const double mean = sum / double(n);
    const double sd = std::sqrt((sq - double(n) * mean * mean) / double(n - 1));
    require(std::abs(mean) <= 0.005, fmt("mean %.5f", mean));
    require(std::abs(sd - 0.1) <= 0.005, fmt("std %.5f", sd));

    std::vector<VideoRecord> recs;
    for (int k = 0; k < 50; ++k)
        recs.push_back({"v" + std::to_string(k), 30.0, 2.0, {2.0 + k % 5, 9.0 + k % 7}, "q", std::nullopt});
    require(perturb_dataset(recs, NoiseSpec{}) == recs, "kind=none changed the records");

    const auto dir = scratch("perturb");
    save_annotations(perturb_dataset(recs, spec), dir / "a.jsonl");
    save_annotations(perturb_dataset(recs, spec), dir / "b.jsonl");
    require(slurp(dir / "a.jsonl") == slurp(dir / "b.jsonl"), "reruns differ");
    return fmt("mean %.5f, std %.5f over %zu draws; none = identity; reruns identical", mean, sd, n);
}

std::string offline_end_to_end() {
    using namespace pipeline;
    const auto quiet = set_warning_sink([](const std::string&) {});
    std::ostringstream log;
    const auto dir = scratch("e2e");
    const auto info = write_fixture(dir, {8, 24, 8, 0, 2.0});
    auto cfg = load_config(info.config_path);
    require(cfg.llm.offline, "fixture config is not offline");

    std::vector<std::string> first;
    for (int run = 0; run < 2; ++run) {
        require(cmd_supervise(cfg, {}, log).exit_code == 0, "supervise failed: " + log.str());
        require(cmd_eval(cfg, cfg.resolve(cfg.paths.predictions), log).exit_code == 0, "eval failed");
        std::vector<std::string> outputs{slurp(supervision_path(cfg)), slurp(cfg.output_dir() / "supervise_report.json"),
                                         slurp(cfg.output_dir() / "metrics.json"),
                                         slurp(cfg.output_dir() / "metrics.csv")};
        if (run == 0) first = outputs;
        else require(outputs == first, "second run output differs");
    }
    const auto targets = load_supervision(supervision_path(cfg));
    require(targets.size() == info.videos.size(), "missing targets");
    for (std::size_t k = 0; k < targets.size(); ++k)
        require(targets[k].s_prime == info.videos[k].start_frame && targets[k].e_prime == info.videos[k].end_frame,
                fmt("video %zu: s'=%zu e'=%zu, planted %zu/%zu", k, targets[k].s_prime, targets[k].e_prime,
                    info.videos[k].start_frame, info.videos[k].end_frame));
    set_warning_sink(quiet);
    return fmt("%zu videos, byte-identical reruns, planted s'/e' recovered", targets.size());
}

std::string defaults_parity() {
    const fs::path root(SOFTBOUND_SOURCE_DIR);
    const auto cfg = pipeline::load_config(root / "config" / "default.ini");
    require(cfg.supervision.tau == 0.8, fmt("tau = %g", cfg.supervision.tau));
    require(cfg.fusion.a == 1.0 && cfg.fusion.b == 1.0, fmt("a = %g, b = %g", cfg.fusion.a, cfg.fusion.b));
    const auto text = slurp(root / "paper.md");
    require(text.find("is set to 0.8") != std::string::npos, "published tau setting not found");
    require(text.find("are both set to 1") != std::string::npos, "published a/b setting not found");
    return "tau=0.8, a=b=1 resolved from config/default.ini";
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<std::string()> run;
        double budget_sec;
    };
    const std::vector<Criterion> criteria{
        {"pseudo-boundary oracle equivalence", pseudo_boundary_oracle, 10.0},
        {"probability vector invariants", probability_invariants, 60.0},
        {"hand-checkable frame scores", hand_instance, 0.0},
        {"threshold and min-max arithmetic", threshold_arithmetic, 0.0},
        {"metric oracle equivalence", metric_oracles, 0.0},
        {"loss values", loss_values, 0.0},
        {"gradient checks", gradient_checks, 0.0},
        {"attention properties", attention_properties, 0.0},
        {"perturbation statistics", perturbation_statistics, 0.0},
        {"offline end-to-end", offline_end_to_end, 30.0},
        {"defaults parity", defaults_parity, 0.0},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = true;
        try {
            detail = c.run();
        } catch (const Failure& f) {
            ok = false;
            detail = f.what;
        } catch (const std::exception& e) {
            ok = false;
            detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (ok && c.budget_sec > 0.0 && secs >= c.budget_sec) {
            ok = false;
            detail += fmt(" (took %.2f s, budget %.0f s)", secs, c.budget_sec);
        }
        failures += ok ? 0 : 1;
        std::printf("%s  %s: %s [%.2f s]\n", ok ? "PASS" : "FAIL", c.name, detail.c_str(), secs);
    }
    std::printf("%zu criteria, %d failed\n", criteria.size(), failures);
    return failures == 0 ? 0 : 1;
}
