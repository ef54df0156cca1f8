#pragma once

#include <cmath>
#include <optional>

#include "softbound/core/matrix.hpp"
#include "softbound/fusion/attention.hpp"

namespace softbound::fusion {

struct FusionConfig {
    double a = 1.0;  // global branch weight
    double b = 1.0;  // local branches weight
    std::optional<double> attn_scale;  // 1/sqrt(D) when unset
    AttentionProjections<double> projections;

    double scale_for(std::size_t dim) const { return attn_scale ? *attn_scale : default_scale<double>(dim); }
};

inline void validate(const FusionConfig& cfg) {
    if (!std::isfinite(cfg.a) || !std::isfinite(cfg.b)) throw InvariantError("fusion weights must be finite");
    if (cfg.a == 0.0 && cfg.b == 0.0) throw InvariantError("fusion weights a and b are both zero");
    if (cfg.attn_scale && !std::isfinite(*cfg.attn_scale)) throw InvariantError("attn_scale must be finite");
}

/// Video features attended separately by the start, original and end query tokens.
struct LocalFeatures {
    EmbeddingMatrix start;
    EmbeddingMatrix query;
    EmbeddingMatrix end;
};

namespace detail {
inline void require_same_dim(const EmbeddingMatrix& v, const EmbeddingMatrix& s, const EmbeddingMatrix& q,
                             const EmbeddingMatrix& e) {
    if (s.dim() != v.dim() || q.dim() != v.dim() || e.dim() != v.dim())
        throw DimensionError("fusion: all features must share the video feature dimension");
}
}  // namespace detail

inline LocalFeatures local_branch(const EmbeddingMatrix& video, const EmbeddingMatrix& start_tokens,
                                  const EmbeddingMatrix& query_tokens, const EmbeddingMatrix& end_tokens,
                                  const FusionConfig& cfg = {}) {
    detail::require_same_dim(video, start_tokens, query_tokens, end_tokens);
    const double scale = cfg.scale_for(video.dim());
    return {cross_attention(video, start_tokens, start_tokens, scale, cfg.projections),
            cross_attention(video, query_tokens, query_tokens, scale, cfg.projections),
            cross_attention(video, end_tokens, end_tokens, scale, cfg.projections)};
}

/// Attention over the stacked [start; query; end] token matrix.
inline EmbeddingMatrix global_branch(const EmbeddingMatrix& video, const EmbeddingMatrix& start_tokens,
                                     const EmbeddingMatrix& query_tokens, const EmbeddingMatrix& end_tokens,
                                     const FusionConfig& cfg = {}) {
    detail::require_same_dim(video, start_tokens, query_tokens, end_tokens);
    const auto stacked = vstack({&start_tokens, &query_tokens, &end_tokens});
    return cross_attention(video, stacked, stacked, cfg.scale_for(video.dim()), cfg.projections);
}

/// a * global + b * (start + query + end), elementwise.
inline EmbeddingMatrix fuse(const EmbeddingMatrix& global, const LocalFeatures& local, const FusionConfig& cfg) {
    for (const auto* m : {&local.start, &local.query, &local.end}) {
        if (m->rows() != global.rows() || m->dim() != global.dim())
            throw DimensionError("fuse: branch outputs differ in shape");
    }
    EmbeddingMatrix out(global.rows(), global.dim());
    for (std::size_t i = 0; i < global.rows(); ++i)
        for (std::size_t d = 0; d < global.dim(); ++d)
            out(i, d) = cfg.a * global(i, d) + cfg.b * (local.start(i, d) + local.query(i, d) + local.end(i, d));
    return out;
}

/// Both branches followed by fuse().
inline EmbeddingMatrix enhance_video(const EmbeddingMatrix& video, const EmbeddingMatrix& start_tokens,
                                     const EmbeddingMatrix& query_tokens, const EmbeddingMatrix& end_tokens,
                                     const FusionConfig& cfg = {}) {
    validate(cfg);
    return fuse(global_branch(video, start_tokens, query_tokens, end_tokens, cfg),
                local_branch(video, start_tokens, query_tokens, end_tokens, cfg), cfg);
}

}  // namespace softbound::fusion
