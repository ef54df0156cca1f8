// softbound: command-line front end for the supervision toolkit.
//
//   softbound fixture   --out DIR [--videos N --frames T --dim D]
//   softbound expand    --config FILE
//   softbound supervise --config FILE [--emit-fused]
//   softbound eval      --config FILE [--predictions FILE]
//   softbound perturb   --config FILE
//   softbound report    --config FILE

#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "softbound/pipeline/commands.hpp"

namespace sp = softbound::pipeline;

namespace {

struct GlobalFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    bool offline = false;
    std::optional<int> jobs;
    bool strict = false;
    bool lenient = false;
};

sp::RunConfig resolve_config(const GlobalFlags& g) {
    sp::RunConfig cfg = g.config.empty() ? sp::RunConfig{} : sp::load_config(g.config);
    if (g.seed) {
        cfg.seed = *g.seed;
        cfg.noise.seed = *g.seed;
    }
    if (g.offline) cfg.llm.offline = true;
    if (g.jobs) cfg.jobs = *g.jobs;
    if (g.strict) cfg.strictness = softbound::Strictness::fatal;
    if (g.lenient) cfg.strictness = softbound::Strictness::lenient;
    sp::validate(cfg);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"softbound: soft boundary supervision and evaluation for action localization"};
    app.set_version_flag("--version", softbound::kVersion);
    app.require_subcommand(1);

    GlobalFlags g;
    app.add_option("--config", g.config, "Run configuration (INI)");
    app.add_option("--seed", g.seed, "Override run.seed");
    app.add_flag("--offline", g.offline, "Never contact the LLM endpoint");
    app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber);
    auto* strict = app.add_flag("--strict", g.strict, "Abort on any invalid record");
    app.add_flag("--lenient", g.lenient, "Skip invalid records with a warning")->excludes(strict);

    auto* expand = app.add_subcommand("expand", "Expand queries into start/end descriptions");
    bool emit_fused = false;
    auto* supervise = app.add_subcommand("supervise", "Generate per-frame boundary probabilities");
    supervise->add_flag("--emit-fused", emit_fused, "Also write fused video features (EMB1)");
    std::string predictions;
    auto* eval = app.add_subcommand("eval", "Compute R1@IoU and mAP");
    eval->add_option("--predictions", predictions, "Predictions JSONL (defaults to paths.predictions)");
    auto* perturb = app.add_subcommand("perturb", "Write noise-perturbed annotations");
    auto* report = app.add_subcommand("report", "Print resolved config and output digest");

    sp::FixtureSpec fx;
    std::string fixture_dir;
    auto* fixture = app.add_subcommand("fixture", "Generate a synthetic offline dataset");
    fixture->add_option("--out", fixture_dir, "Output directory")->required();
    fixture->add_option("--videos", fx.videos, "Number of videos")->check(CLI::PositiveNumber);
    fixture->add_option("--frames", fx.frames, "Frames per video (>= 4)");
    fixture->add_option("--dim", fx.dim, "Feature dimension (>= 2)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*fixture) {
            if (g.seed) fx.seed = *g.seed;
            return sp::cmd_fixture(fixture_dir, fx).exit_code;
        }
        const auto cfg = resolve_config(g);
        if (*expand) {
            std::unique_ptr<softbound::expansion::LlmClient> client;
            if (!cfg.llm.offline) client = softbound::expansion::HttpLlmClient::from_environment();
            if (!cfg.llm.offline && !client)
                softbound::warn("LLMX_BASE_URL is not set; only cached expansions are available");
            return sp::cmd_expand(cfg, client.get()).exit_code;
        }
        if (*supervise) return sp::cmd_supervise(cfg, {emit_fused}).exit_code;
        if (*eval) {
            const auto path = predictions.empty() ? cfg.resolve(cfg.paths.predictions) : sp::fs::path(predictions);
            if (predictions.empty() && cfg.paths.predictions.empty())
                throw softbound::IoError("no predictions file: pass --predictions or set paths.predictions");
            return sp::cmd_eval(cfg, path).exit_code;
        }
        if (*perturb) return sp::cmd_perturb(cfg).exit_code;
        if (*report) {
            std::cout << sp::cmd_report(cfg).summary.dump(2) << '\n';
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
