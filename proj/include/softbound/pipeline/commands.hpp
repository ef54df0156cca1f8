#pragma once

#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "softbound/core/annotations.hpp"
#include "softbound/core/embedding_io.hpp"
#include "softbound/core/supervision_io.hpp"
#include "softbound/expansion/expander.hpp"
#include "softbound/expansion/query_noise.hpp"
#include "softbound/fusion/temporal_fusion.hpp"
#include "softbound/losses/toy_head.hpp"
#include "softbound/metrics/metrics.hpp"
#include "softbound/metrics/predictions_io.hpp"
#include "softbound/perturbation/noise.hpp"
#include "softbound/pipeline/config.hpp"
#include "softbound/pipeline/fixture.hpp"
#include "softbound/pipeline/layout.hpp"
#include "softbound/pipeline/worker_pool.hpp"
#include "softbound/supervision/boundary_probability.hpp"
#include "softbound/version.hpp"

namespace softbound::pipeline {

/// Exit status plus a machine-readable summary of what happened.
struct CommandResult {
    int exit_code = 0;
    json summary = json::object();
};

namespace detail {

inline json report_header(const RunConfig& c, const char* command) {
    return {{"command", command}, {"version", kVersion}, {"config", config_to_json(c)}};
}

inline void write_json(const fs::path& path, const json& j) {
    softbound::detail::write_text_file(path, j.dump(2) + "\n");
}

/// Unique query texts in order of first appearance.
inline std::vector<std::string> unique_queries(const std::vector<VideoRecord>& records) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& r : records) {
        auto q = expansion::detail::trim_copy(r.query_text);
        if (seen.insert(q).second) out.push_back(std::move(q));
    }
    return out;
}

}  // namespace detail

/// Expands every unique query (cache first) and writes expansions.jsonl.
inline CommandResult cmd_expand(const RunConfig& cfg, expansion::LlmClient* client, std::ostream& log = std::cerr) {
    validate(cfg);
    require_paths(cfg, {"annotations"});
    const auto records = load_annotations(cfg.resolve(cfg.paths.annotations),
                                          cfg.strictness.value_or(Strictness::fatal));
    const auto queries = detail::unique_queries(records);

    expansion::ExpansionCache cache(cfg.resolve(cfg.paths.cache));
    expansion::ExpanderOptions opts;
    opts.offline = cfg.llm.offline;
    opts.network_attempts = cfg.llm.network_attempts;
    opts.reprompts = cfg.llm.reprompts;
    expansion::QueryExpander expander(cache, cfg.llm.offline ? nullptr : client, opts);

    std::vector<std::optional<ExpandedQuery>> rows(queries.size());
    std::vector<std::string> errors(queries.size());
    parallel_for(queries.size(), cfg.jobs, [&](std::size_t i) {
        try {
            rows[i] = expander.expand({queries[i], cfg.llm.model_id, cfg.llm.temperature, cfg.llm.max_tokens});
        } catch (const Error& e) {
            errors[i] = e.what();
        }
    });

    CommandResult res;
    json failed = json::array();
    std::vector<ExpandedQuery> ok;
    for (std::size_t i = 0; i < queries.size(); ++i) {
        if (rows[i]) {
            ok.push_back(*rows[i]);
        } else {
            failed.push_back({{"query", queries[i]}, {"error", errors[i]}});
            log << "expand: failed: " << queries[i] << ": " << errors[i] << '\n';
        }
    }
    ok = expansion::inject_query_noise(std::move(ok), cfg.llm.noise_fraction, cfg.seed);
    save_expansions(ok, expansions_path(cfg));

    res.summary = detail::report_header(cfg, "expand");
    res.summary["queries"] = queries.size();
    res.summary["cache_hits"] = expander.cache_hits();
    res.summary["cache_misses"] = expander.cache_misses();
    res.summary["network_calls"] = expander.network_calls();
    res.summary["failures"] = failed;
    detail::write_json(cfg.output_dir() / "expand_report.json", res.summary);
    log << "expand: " << queries.size() << " queries, " << expander.cache_hits() << " hits, "
        << expander.cache_misses() << " misses, " << failed.size() << " failures\n";
    res.exit_code = failed.empty() ? 0 : 1;
    return res;
}

struct SuperviseOptions {
    bool emit_fused = false;
};

/// Builds one SupervisionTarget per record and writes supervision.jsonl.
/// Expansions come from expansions.jsonl when present, otherwise from the
/// cache without touching the network.
inline CommandResult cmd_supervise(const RunConfig& config, const SuperviseOptions& opts = {},
                                   std::ostream& log = std::cerr) {
    RunConfig cfg = config;
    validate(cfg);
    require_paths(cfg, {"annotations", "embeddings_dir"});
    load_projections(cfg);
    const auto strictness = cfg.strictness.value_or(Strictness::fatal);
    const auto records = load_annotations(cfg.resolve(cfg.paths.annotations), strictness);

    std::unordered_map<std::string, ExpandedQuery> expansions;
    if (fs::exists(expansions_path(cfg))) {
        for (auto& q : load_expansions(expansions_path(cfg))) expansions.emplace(q.original, std::move(q));
    } else {
        expansion::ExpansionCache cache(cfg.resolve(cfg.paths.cache));
        expansion::ExpanderOptions eopts;
        eopts.offline = true;
        expansion::QueryExpander expander(cache, nullptr, eopts);
        for (const auto& q : detail::unique_queries(records)) {
            try {
                expansions.emplace(q, expander.expand({q, cfg.llm.model_id, cfg.llm.temperature, cfg.llm.max_tokens}));
            } catch (const expansion::ExpansionError&) {
                // reported per record below
            }
        }
    }

    const bool need_fused = opts.emit_fused;
    if (need_fused) fs::create_directories(cfg.output_dir() / "fused");

    struct Outcome {
        std::optional<SupervisionTarget> target;
        std::string error;
        bool at_anchor = false;
        double head_loss = 0.0;
    };
    std::vector<Outcome> outcomes(records.size());

    parallel_for(records.size(), cfg.jobs, [&](std::size_t i) {
        const auto& r = records[i];
        auto& out = outcomes[i];
        try {
            const auto q = expansion::detail::trim_copy(r.query_text);
            const auto it = expansions.find(q);
            if (it == expansions.end()) throw InvariantError("no expansion for query '" + q + "'");
            const auto video = load_embeddings(video_embedding_path(cfg, r));
            supervision::QueryEmbeddings text{load_embeddings(text_embedding_path(cfg, q)),
                                              load_embeddings(text_embedding_path(cfg, it->second.start_desc)),
                                              load_embeddings(text_embedding_path(cfg, it->second.end_desc))};
            auto target = supervision::generate_supervision(r, video, text, cfg.supervision);

            const auto frames = video.rows();
            const auto anchor_s = frame_of_time(r.annotation.start, r.clip_stride_sec, frames);
            const auto anchor_e = frame_of_time(r.annotation.end, r.clip_stride_sec, frames);
            out.at_anchor = cfg.supervision.strategy != supervision::Strategy::gauss &&
                            target.s_prime == anchor_s && target.e_prime == anchor_e;

            const auto fused = fusion::enhance_video(video, text.start, text.query, text.end, cfg.fusion);
            const auto stacked = vstack({&text.start, &text.query, &text.end});
            const auto p_hat = losses::toy_boundary_head(fused, stacked, cfg.toy_head);
            out.head_loss = losses::boundary_loss(target.probs, p_hat);
            if (need_fused) save_embeddings(fused, cfg.output_dir() / "fused" / (r.video_id + ".emb"));
            out.target = std::move(target);
        } catch (const Error& e) {
            out.error = e.what();
        }
    });

    CommandResult res;
    std::vector<SupervisionTarget> targets;
    json failed = json::array();
    double loss_sum = 0.0;
    std::size_t anchored = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (outcomes[i].target) {
            targets.push_back(*outcomes[i].target);
            loss_sum += outcomes[i].head_loss;
            anchored += outcomes[i].at_anchor ? 1 : 0;
        } else {
            failed.push_back({{"video_id", records[i].video_id}, {"error", outcomes[i].error}});
            log << "supervise: " << records[i].video_id << ": " << outcomes[i].error << '\n';
        }
    }
    if (!failed.empty() && strictness == Strictness::fatal) {
        log << "supervise: " << failed.size() << " record(s) failed; nothing written (strict mode)\n";
        res.exit_code = 1;
        res.summary = {{"failures", failed}};
        return res;
    }

    save_supervision(targets, supervision_path(cfg));
    res.summary = detail::report_header(cfg, "supervise");
    res.summary["records"] = records.size();
    res.summary["written"] = targets.size();
    res.summary["pseudo_equals_annotation"] = anchored;
    res.summary["mean_head_boundary_loss"] = text_round(targets.empty() ? 0.0 : loss_sum / double(targets.size()));
    res.summary["failures"] = failed;
    detail::write_json(cfg.output_dir() / "supervise_report.json", res.summary);
    log << "supervise: wrote " << targets.size() << " of " << records.size() << " targets\n";
    return res;
}

/// Scores predictions against the annotations; writes metrics.json and
/// metrics.csv.
inline CommandResult cmd_eval(const RunConfig& cfg, const fs::path& predictions, std::ostream& log = std::cerr) {
    validate(cfg);
    require_paths(cfg, {"annotations"});
    if (!fs::exists(predictions)) throw IoError("predictions file does not exist: " + predictions.string());
    const auto strictness = cfg.strictness.value_or(Strictness::lenient);
    const auto records = load_annotations(cfg.resolve(cfg.paths.annotations), strictness);
    const auto preds = metrics::load_predictions(predictions, strictness);
    if (preds.empty()) warn("eval: " + predictions.string() + " holds no predictions; all metrics are 0");

    const auto gt = metrics::ground_truth_from(records);
    const auto report = metrics::evaluate(preds, gt, cfg.r1_thresholds, cfg.map_thresholds);

    CommandResult res;
    res.summary = detail::report_header(cfg, "eval");
    res.summary["queries"] = gt.size();
    res.summary["predictions"] = preds.size();
    res.summary["metrics"] = metrics::report_to_json(report);
    detail::write_json(cfg.output_dir() / "metrics.json", res.summary);
    softbound::detail::write_text_file(cfg.output_dir() / "metrics.csv", metrics::report_to_csv(report));
    for (const auto& [mu, v] : report.r1_at) log << "R1@" << mu << " = " << v << '\n';
    log << "mAP = " << report.map_mean << '\n';
    return res;
}

/// Perturbs every annotation with cfg.noise and writes the result, headed
/// by a provenance line.
inline CommandResult cmd_perturb(const RunConfig& cfg, std::ostream& log = std::cerr) {
    validate(cfg);
    require_paths(cfg, {"annotations"});
    const auto records = load_annotations(cfg.resolve(cfg.paths.annotations),
                                          cfg.strictness.value_or(Strictness::fatal));
    const auto perturbed = perturbation::perturb_dataset(records, cfg.noise);

    double shift = 0.0, iou = 0.0;
    for (std::size_t k = 0; k < records.size(); ++k) {
        shift += std::abs(perturbed[k].annotation.start - records[k].annotation.start);
        iou += metrics::temporal_iou(perturbed[k].annotation, records[k].annotation);
    }
    const double n = records.empty() ? 1.0 : double(records.size());

    json provenance = {{"_provenance",
                        {{"version", kVersion},
                         {"noise", config_to_json(cfg)["noise"]},
                         {"source", cfg.paths.annotations}}}};
    save_annotations(perturbed, cfg.output_dir() / "perturbed_annotations.jsonl", &provenance);

    CommandResult res;
    res.summary = detail::report_header(cfg, "perturb");
    res.summary["records"] = records.size();
    res.summary["mean_abs_start_shift_sec"] = text_round(shift / n);
    res.summary["mean_iou_with_original"] = text_round(iou / n);
    detail::write_json(cfg.output_dir() / "perturb_report.json", res.summary);
    log << "perturb: " << records.size() << " records, mean |dstart| = " << shift / n << " s\n";
    return res;
}

inline CommandResult cmd_fixture(const fs::path& dir, const FixtureSpec& spec, std::ostream& log = std::cerr) {
    const auto info = write_fixture(dir, spec);
    CommandResult res;
    res.summary = {{"command", "fixture"}, {"version", kVersion}, {"config", info.config_path.string()},
                   {"videos", spec.videos}, {"frames", spec.frames}, {"dim", spec.dim}, {"seed", spec.seed}};
    log << "fixture: " << spec.videos << " videos written to " << dir.string() << '\n';
    return res;
}

/// Resolved configuration, version, and a digest of any outputs present.
inline CommandResult cmd_report(const RunConfig& cfg) {
    validate(cfg);
    CommandResult res;
    res.summary = detail::report_header(cfg, "report");
    json outputs = json::object();
    if (fs::exists(supervision_path(cfg))) {
        const auto targets = load_supervision(supervision_path(cfg));
        double certain = 0.0, soft = 0.0;
        for (const auto& t : targets) {
            certain += double(t.e_prime - t.s_prime + 1);
            for (std::size_t i = 0; i < t.probs.size(); ++i)
                if ((i < t.s_prime || i > t.e_prime) && t.probs[i] > 0.0) soft += 1.0;
        }
        const double n = targets.empty() ? 1.0 : double(targets.size());
        outputs["supervision"] = {{"targets", targets.size()},
                                  {"mean_certain_frames", text_round(certain / n)},
                                  {"mean_soft_frames", text_round(soft / n)}};
    }
    for (const char* name : {"metrics.json", "supervise_report.json", "expand_report.json", "perturb_report.json"}) {
        const auto p = cfg.output_dir() / name;
        if (!fs::exists(p)) continue;
        std::ifstream in(p);
        outputs[name] = json::parse(in);
    }
    res.summary["outputs"] = outputs;
    return res;
}

}  // namespace softbound::pipeline
