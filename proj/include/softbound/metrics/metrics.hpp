#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "softbound/core/types.hpp"

namespace softbound::metrics {

struct Prediction {
    std::string video_id;
    Segment segment;
    double score = 0.0;
    std::optional<int> rank;  // explicit rank overrides score ordering

    friend bool operator==(const Prediction&, const Prediction&) = default;
};

/// Ground-truth moments per query, keyed by video_id.
using GroundTruth = std::map<std::string, std::vector<Segment>>;

inline GroundTruth ground_truth_from(const std::vector<VideoRecord>& records) {
    GroundTruth gt;
    for (const auto& r : records) gt[r.video_id].push_back(r.annotation);
    return gt;
}

struct MetricReport {
    std::map<double, double> r1_at;
    std::map<double, double> per_threshold_ap;
    double map_mean = 0.0;
};

inline double temporal_iou(const Segment& a, const Segment& b) {
    const double inter = std::max(0.0, std::min(a.end, b.end) - std::max(a.start, b.start));
    const double uni = a.length() + b.length() - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

/// Default mAP grid 0.50, 0.55, ..., 0.95.
inline std::vector<double> default_map_thresholds() {
    std::vector<double> t;
    for (int k = 0; k <= 9; ++k) t.push_back(std::round((0.5 + 0.05 * k) * 100.0) / 100.0);
    return t;
}

/// Predictions per video in ranked order: explicit rank ascending when
/// given, else score descending, then earlier start, then input order.
inline std::map<std::string, std::vector<Prediction>> rank_predictions(const std::vector<Prediction>& preds) {
    std::map<std::string, std::vector<Prediction>> by_video;
    for (const auto& p : preds) by_video[p.video_id].push_back(p);
    for (auto& [vid, list] : by_video) {
        std::set<int> seen;
        for (const auto& p : list) {
            if (p.rank && !seen.insert(*p.rank).second)
                throw InvariantError("duplicate rank " + std::to_string(*p.rank) + " for video " + vid);
        }
        std::stable_sort(list.begin(), list.end(), [](const Prediction& a, const Prediction& b) {
            if (a.rank && b.rank) return *a.rank < *b.rank;
            if (a.rank != b.rank) return a.rank.has_value();
            if (a.score != b.score) return a.score > b.score;
            return a.segment.start < b.segment.start;
        });
    }
    return by_video;
}

namespace detail {
inline double best_iou(const Segment& s, const std::vector<Segment>& gts) {
    double best = 0.0;
    for (const auto& g : gts) best = std::max(best, temporal_iou(s, g));
    return best;
}
}  // namespace detail

/// Fraction of ground-truth queries whose top-ranked prediction reaches
/// IoU >= mu with one of its ground-truth moments. Queries without
/// predictions count as misses.
inline double r1_at_iou(const std::map<std::string, std::vector<Prediction>>& ranked, const GroundTruth& gt,
                        double mu) {
    if (gt.empty()) return 0.0;
    std::size_t hits = 0;
    for (const auto& [vid, moments] : gt) {
        const auto it = ranked.find(vid);
        if (it == ranked.end() || it->second.empty()) continue;
        if (detail::best_iou(it->second.front().segment, moments) >= mu) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(gt.size());
}

inline double r1_at_iou(const std::vector<Prediction>& preds, const GroundTruth& gt, double mu) {
    return r1_at_iou(rank_predictions(preds), gt, mu);
}

/// Average precision for one query. Ranked predictions greedily claim the
/// unmatched ground-truth moment of highest IoU (>= mu); precision is
/// interpolated with the all-points rule.
inline double average_precision(const std::vector<Prediction>& ranked, const std::vector<Segment>& gts, double mu) {
    if (gts.empty() || ranked.empty()) return 0.0;
    std::vector<bool> taken(gts.size(), false);
    std::vector<double> precision, recall;
    std::size_t tp = 0;
    for (std::size_t k = 0; k < ranked.size(); ++k) {
        std::vector<std::size_t> order(gts.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::vector<double> ious(gts.size());
        for (std::size_t g = 0; g < gts.size(); ++g) ious[g] = temporal_iou(ranked[k].segment, gts[g]);
        std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return ious[x] > ious[y]; });
        for (auto g : order) {
            if (ious[g] < mu) break;
            if (taken[g]) continue;
            taken[g] = true;
            ++tp;
            break;
        }
        precision.push_back(double(tp) / double(k + 1));
        recall.push_back(double(tp) / double(gts.size()));
    }
    // All-points interpolation over the precision envelope.
    std::vector<double> mprec{0.0}, mrec{0.0};
    mprec.insert(mprec.end(), precision.begin(), precision.end());
    mrec.insert(mrec.end(), recall.begin(), recall.end());
    mprec.push_back(0.0);
    mrec.push_back(1.0);
    for (std::size_t i = mprec.size() - 1; i-- > 0;) mprec[i] = std::max(mprec[i], mprec[i + 1]);
    double ap = 0.0;
    for (std::size_t i = 1; i < mrec.size(); ++i)
        if (mrec[i] != mrec[i - 1]) ap += (mrec[i] - mrec[i - 1]) * mprec[i];
    return ap;
}

/// R1 at `r1_thresholds` and mAP over `map_thresholds` (mean over queries
/// per threshold, then mean over thresholds).
inline MetricReport evaluate(const std::vector<Prediction>& preds, const GroundTruth& gt,
                             const std::vector<double>& r1_thresholds = {0.5, 0.7},
                             const std::vector<double>& map_thresholds = default_map_thresholds()) {
    if (gt.empty()) throw InvariantError("evaluation needs at least one ground-truth query");
    if (map_thresholds.empty()) throw InvariantError("mAP threshold list is empty");
    for (double mu : map_thresholds)
        if (!(mu > 0.0 && mu <= 1.0)) throw InvariantError("mAP thresholds must lie in (0, 1]");
    const auto ranked = rank_predictions(preds);
    MetricReport rep;
    for (double mu : r1_thresholds) rep.r1_at[mu] = r1_at_iou(ranked, gt, mu);
    double sum = 0.0;
    for (double mu : map_thresholds) {
        double ap_sum = 0.0;
        for (const auto& [vid, moments] : gt) {
            const auto it = ranked.find(vid);
            if (it != ranked.end()) ap_sum += average_precision(it->second, moments, mu);
        }
        const double ap = ap_sum / double(gt.size());
        rep.per_threshold_ap[mu] = ap;
        sum += ap;
    }
    rep.map_mean = sum / double(map_thresholds.size());
    return rep;
}

inline MetricReport mean_ap(const std::vector<Prediction>& preds, const GroundTruth& gt,
                            const std::vector<double>& thresholds = default_map_thresholds()) {
    return evaluate(preds, gt, {}, thresholds);
}

}  // namespace softbound::metrics
