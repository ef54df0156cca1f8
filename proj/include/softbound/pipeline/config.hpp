#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "softbound/core/embedding_io.hpp"
#include "softbound/core/jsonl.hpp"
#include "softbound/expansion/expander.hpp"
#include "softbound/fusion/temporal_fusion.hpp"
#include "softbound/losses/losses.hpp"
#include "softbound/losses/toy_head.hpp"
#include "softbound/metrics/metrics.hpp"
#include "softbound/perturbation/noise.hpp"
#include "softbound/supervision/boundary_probability.hpp"

namespace softbound::pipeline {

namespace fs = std::filesystem;

struct PathsConfig {
    std::string annotations = "annotations.jsonl";
    std::string embeddings_dir = "embeddings";
    std::string cache = "expansion_cache.jsonl";
    std::string output_dir = "out";
    std::string predictions;  // optional; eval input
};

struct LlmConfig {
    std::string model_id = expansion::kDefaultModel;
    double temperature = 0.0;
    int max_tokens = 128;
    bool offline = false;
    double noise_fraction = 0.0;  // start/end swap ablation
    int network_attempts = 3;
    int reprompts = 2;
};

struct FusionPaths {
    std::string projection_query, projection_key, projection_value;
};

/// Everything one run needs. Relative paths resolve against base_dir.
struct RunConfig {
    fs::path base_dir = ".";
    PathsConfig paths;
    supervision::SupervisionConfig supervision;
    fusion::FusionConfig fusion;
    FusionPaths fusion_paths;
    losses::LossWeights losses;
    losses::ToyHeadParams toy_head;
    perturbation::NoiseSpec noise;
    LlmConfig llm;
    std::vector<double> r1_thresholds{0.5, 0.7};
    std::vector<double> map_thresholds = metrics::default_map_thresholds();
    std::uint64_t seed = 0;
    int jobs = 1;
    std::optional<Strictness> strictness;  // unset: per-command default

    fs::path resolve(const std::string& p) const {
        const fs::path path(p);
        return path.is_absolute() ? path : base_dir / path;
    }
    fs::path output_dir() const { return resolve(paths.output_dir); }
};

namespace detail {

inline std::vector<double> parse_list(const std::string& s, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
        } catch (const std::exception&) {
            throw InvariantError("config: bad number '" + item + "' in " + key);
        }
    }
    return out;
}

inline std::string join_list(const std::vector<double>& v) {
    std::string out;
    char buf[32];
    for (std::size_t k = 0; k < v.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.9g", v[k]);
        if (k) out += ',';
        out += buf;
    }
    return out;
}

inline bool parse_bool(const std::string& s, const std::string& key) {
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw InvariantError("config: " + key + " expects a boolean, got '" + s + "'");
}

template <typename T>
void read(const boost::property_tree::ptree& pt, const char* key, T& dst) {
    const auto v = pt.get_optional<std::string>(key);
    if (!v) return;
    try {
        if constexpr (std::is_same_v<T, std::string>) {
            dst = *v;
        } else if constexpr (std::is_same_v<T, bool>) {
            dst = parse_bool(*v, key);
        } else if constexpr (std::is_integral_v<T>) {
            std::size_t used = 0;
            const long long n = std::stoll(*v, &used);
            if (used != v->size()) throw std::invalid_argument(*v);
            dst = static_cast<T>(n);
        } else {
            std::size_t used = 0;
            dst = std::stod(*v, &used);
            if (used != v->size()) throw std::invalid_argument(*v);
        }
    } catch (const InvariantError&) {
        throw;
    } catch (const std::exception&) {
        throw InvariantError(std::string("config: cannot parse ") + key + " = '" + *v + "'");
    }
}

}  // namespace detail

/// Parses INI text. Unknown keys are rejected so typos surface early.
inline RunConfig parse_config(const std::string& ini_text, const fs::path& base_dir = ".") {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in(ini_text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw FormatError(std::string("config: ") + e.what(), e.line());
    }

    static const std::map<std::string, std::set<std::string>> known = {
        {"paths", {"annotations", "embeddings_dir", "cache", "output_dir", "predictions"}},
        {"supervision", {"tau", "strategy", "gauss_sigma"}},
        {"fusion", {"a", "b", "attn_scale", "projection_query", "projection_key", "projection_value"}},
        {"losses", {"lambda_l1", "lambda_iou", "lambda_saliency", "lambda_cls", "margin_delta", "head_gamma",
                    "head_beta"}},
        {"noise", {"kind", "sigma", "lo", "hi"}},
        {"llm", {"model_id", "temperature", "max_tokens", "offline", "noise_fraction", "network_attempts",
                 "reprompts"}},
        {"eval", {"r1_thresholds", "map_thresholds"}},
        {"run", {"seed", "jobs", "strictness"}},
    };
    for (const auto& [section, body] : tree) {
        const auto it = known.find(section);
        if (it == known.end()) throw InvariantError("config: unknown section [" + section + "]");
        for (const auto& [key, value] : body)
            if (!it->second.count(key)) throw InvariantError("config: unknown key " + section + "." + key);
    }

    RunConfig c;
    c.base_dir = base_dir;
    using detail::read;
    read(tree, "paths.annotations", c.paths.annotations);
    read(tree, "paths.embeddings_dir", c.paths.embeddings_dir);
    read(tree, "paths.cache", c.paths.cache);
    read(tree, "paths.output_dir", c.paths.output_dir);
    read(tree, "paths.predictions", c.paths.predictions);

    read(tree, "supervision.tau", c.supervision.tau);
    std::string strategy{supervision::to_string(c.supervision.strategy)};
    read(tree, "supervision.strategy", strategy);
    c.supervision.strategy = supervision::parse_strategy(strategy);
    read(tree, "supervision.gauss_sigma", c.supervision.gauss_sigma);

    read(tree, "fusion.a", c.fusion.a);
    read(tree, "fusion.b", c.fusion.b);
    if (auto s = tree.get_optional<std::string>("fusion.attn_scale"); s && !s->empty() && *s != "auto") {
        double v = 0;
        read(tree, "fusion.attn_scale", v);
        c.fusion.attn_scale = v;
    }
    read(tree, "fusion.projection_query", c.fusion_paths.projection_query);
    read(tree, "fusion.projection_key", c.fusion_paths.projection_key);
    read(tree, "fusion.projection_value", c.fusion_paths.projection_value);

    read(tree, "losses.lambda_l1", c.losses.lambda_l1);
    read(tree, "losses.lambda_iou", c.losses.lambda_iou);
    read(tree, "losses.lambda_saliency", c.losses.lambda_saliency);
    read(tree, "losses.lambda_cls", c.losses.lambda_cls);
    read(tree, "losses.margin_delta", c.losses.margin_delta);
    read(tree, "losses.head_gamma", c.toy_head.gamma);
    read(tree, "losses.head_beta", c.toy_head.beta);

    std::string kind{perturbation::to_string(c.noise.kind)};
    read(tree, "noise.kind", kind);
    c.noise.kind = perturbation::parse_noise_kind(kind);
    read(tree, "noise.sigma", c.noise.sigma);
    read(tree, "noise.lo", c.noise.lo);
    read(tree, "noise.hi", c.noise.hi);

    read(tree, "llm.model_id", c.llm.model_id);
    read(tree, "llm.temperature", c.llm.temperature);
    read(tree, "llm.max_tokens", c.llm.max_tokens);
    read(tree, "llm.offline", c.llm.offline);
    read(tree, "llm.noise_fraction", c.llm.noise_fraction);
    read(tree, "llm.network_attempts", c.llm.network_attempts);
    read(tree, "llm.reprompts", c.llm.reprompts);

    if (auto s = tree.get_optional<std::string>("eval.r1_thresholds"))
        c.r1_thresholds = detail::parse_list(*s, "eval.r1_thresholds");
    if (auto s = tree.get_optional<std::string>("eval.map_thresholds"))
        c.map_thresholds = detail::parse_list(*s, "eval.map_thresholds");

    read(tree, "run.seed", c.seed);
    c.noise.seed = c.seed;
    read(tree, "run.jobs", c.jobs);
    if (auto s = tree.get_optional<std::string>("run.strictness")) {
        if (*s == "strict") c.strictness = Strictness::fatal;
        else if (*s == "lenient") c.strictness = Strictness::lenient;
        else throw InvariantError("config: run.strictness must be strict or lenient");
    }
    return c;
}

inline RunConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    auto base = path.parent_path();
    return parse_config(ss.str(), base.empty() ? fs::path(".") : base);
}

/// Numeric invariants of every owning module. Throws InvariantError.
inline void validate(const RunConfig& c) {
    supervision::validate(c.supervision);
    fusion::validate(c.fusion);
    losses::validate(c.losses);
    if (!std::isfinite(c.toy_head.gamma) || !std::isfinite(c.toy_head.beta))
        throw InvariantError("toy head parameters must be finite");
    perturbation::validate(c.noise);
    if (!(c.llm.temperature >= 0.0 && c.llm.temperature <= 2.0))
        throw InvariantError("llm.temperature must lie in [0, 2]");
    if (c.llm.max_tokens <= 0) throw InvariantError("llm.max_tokens must be positive");
    if (!(c.llm.noise_fraction >= 0.0 && c.llm.noise_fraction <= 1.0))
        throw InvariantError("llm.noise_fraction must lie in [0, 1]");
    if (c.llm.network_attempts < 1 || c.llm.reprompts < 0) throw InvariantError("llm retry counts out of range");
    for (double mu : c.r1_thresholds)
        if (!(mu > 0.0 && mu <= 1.0)) throw InvariantError("eval.r1_thresholds must lie in (0, 1]");
    if (c.map_thresholds.empty()) throw InvariantError("eval.map_thresholds is empty");
    for (double mu : c.map_thresholds)
        if (!(mu > 0.0 && mu <= 1.0)) throw InvariantError("eval.map_thresholds must lie in (0, 1]");
    if (c.jobs < 1) throw InvariantError("run.jobs must be >= 1");
}

/// Throws IoError unless each path exists.
inline void require_paths(const RunConfig& c, std::initializer_list<std::string> keys) {
    for (const auto& key : keys) {
        std::string p;
        if (key == "annotations") p = c.paths.annotations;
        else if (key == "embeddings_dir") p = c.paths.embeddings_dir;
        else if (key == "cache") p = c.paths.cache;
        else if (key == "predictions") p = c.paths.predictions;
        if (p.empty()) throw IoError("config: paths." + key + " is not set");
        if (!fs::exists(c.resolve(p))) throw IoError("paths." + key + " does not exist: " + c.resolve(p).string());
    }
}

/// Loads any projection matrices named in the config into c.fusion.
inline void load_projections(RunConfig& c) {
    auto load = [&](const std::string& p, std::optional<EmbeddingMatrix>& dst) {
        if (p.empty()) return;
        dst = load_embeddings(c.resolve(p));
        if (dst->rows() != dst->dim()) throw DimensionError("projection matrix " + p + " is not square");
    };
    load(c.fusion_paths.projection_query, c.fusion.projections.query);
    load(c.fusion_paths.projection_key, c.fusion.projections.key);
    load(c.fusion_paths.projection_value, c.fusion.projections.value);
}

/// JSON view of the resolved configuration, embedded in every report.
/// Paths are reported as written in the config.
inline json config_to_json(const RunConfig& c) {
    json j;
    j["paths"] = {{"annotations", c.paths.annotations},
                  {"embeddings_dir", c.paths.embeddings_dir},
                  {"cache", c.paths.cache},
                  {"output_dir", c.paths.output_dir},
                  {"predictions", c.paths.predictions}};
    j["supervision"] = {{"tau", c.supervision.tau},
                        {"strategy", supervision::to_string(c.supervision.strategy)},
                        {"gauss_sigma", c.supervision.gauss_sigma}};
    j["fusion"] = {{"a", c.fusion.a},
                   {"b", c.fusion.b},
                   {"attn_scale", c.fusion.attn_scale ? json(*c.fusion.attn_scale) : json("auto")},
                   {"projection_query", c.fusion_paths.projection_query},
                   {"projection_key", c.fusion_paths.projection_key},
                   {"projection_value", c.fusion_paths.projection_value}};
    j["losses"] = {{"lambda_l1", c.losses.lambda_l1},     {"lambda_iou", c.losses.lambda_iou},
                   {"lambda_saliency", c.losses.lambda_saliency}, {"lambda_cls", c.losses.lambda_cls},
                   {"margin_delta", c.losses.margin_delta}, {"head_gamma", c.toy_head.gamma},
                   {"head_beta", c.toy_head.beta}};
    j["noise"] = {{"kind", perturbation::to_string(c.noise.kind)},
                  {"sigma", c.noise.sigma},
                  {"lo", c.noise.lo},
                  {"hi", c.noise.hi},
                  {"seed", c.noise.seed},
                  {"engine", perturbation::kEngineName}};
    j["llm"] = {{"model_id", c.llm.model_id},
                {"temperature", c.llm.temperature},
                {"max_tokens", c.llm.max_tokens},
                {"offline", c.llm.offline},
                {"noise_fraction", c.llm.noise_fraction},
                {"prompt_version", expansion::kPromptVersion}};
    j["eval"] = {{"r1_thresholds", detail::join_list(c.r1_thresholds)},
                 {"map_thresholds", detail::join_list(c.map_thresholds)}};
    j["run"] = {{"seed", c.seed}, {"jobs", c.jobs}};
    return j;
}

/// INI text reproducing `c` (used by the fixture generator and `report`).
inline std::string config_to_ini(const RunConfig& c) {
    std::ostringstream o;
    auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.9g", v);
        return std::string(buf);
    };
    o << "[paths]\n"
      << "annotations = " << c.paths.annotations << "\n"
      << "embeddings_dir = " << c.paths.embeddings_dir << "\n"
      << "cache = " << c.paths.cache << "\n"
      << "output_dir = " << c.paths.output_dir << "\n";
    if (!c.paths.predictions.empty()) o << "predictions = " << c.paths.predictions << "\n";
    o << "\n[supervision]\n"
      << "tau = " << num(c.supervision.tau) << "\n"
      << "strategy = " << supervision::to_string(c.supervision.strategy) << "\n"
      << "gauss_sigma = " << num(c.supervision.gauss_sigma) << "\n"
      << "\n[fusion]\n"
      << "a = " << num(c.fusion.a) << "\n"
      << "b = " << num(c.fusion.b) << "\n"
      << "attn_scale = " << (c.fusion.attn_scale ? num(*c.fusion.attn_scale) : std::string("auto")) << "\n"
      << "\n[losses]\n"
      << "lambda_l1 = " << num(c.losses.lambda_l1) << "\n"
      << "lambda_iou = " << num(c.losses.lambda_iou) << "\n"
      << "lambda_saliency = " << num(c.losses.lambda_saliency) << "\n"
      << "lambda_cls = " << num(c.losses.lambda_cls) << "\n"
      << "margin_delta = " << num(c.losses.margin_delta) << "\n"
      << "head_gamma = " << num(c.toy_head.gamma) << "\n"
      << "head_beta = " << num(c.toy_head.beta) << "\n"
      << "\n[noise]\n"
      << "kind = " << perturbation::to_string(c.noise.kind) << "\n"
      << "sigma = " << num(c.noise.sigma) << "\n"
      << "lo = " << num(c.noise.lo) << "\n"
      << "hi = " << num(c.noise.hi) << "\n"
      << "\n[llm]\n"
      << "model_id = " << c.llm.model_id << "\n"
      << "temperature = " << num(c.llm.temperature) << "\n"
      << "max_tokens = " << c.llm.max_tokens << "\n"
      << "offline = " << (c.llm.offline ? "true" : "false") << "\n"
      << "noise_fraction = " << num(c.llm.noise_fraction) << "\n"
      << "\n[eval]\n"
      << "r1_thresholds = " << detail::join_list(c.r1_thresholds) << "\n"
      << "map_thresholds = " << detail::join_list(c.map_thresholds) << "\n"
      << "\n[run]\n"
      << "seed = " << c.seed << "\n"
      << "jobs = " << c.jobs << "\n";
    return o.str();
}

}  // namespace softbound::pipeline
