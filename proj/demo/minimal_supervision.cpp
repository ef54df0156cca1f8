// Builds soft supervision for a hand-made six-frame video and prints it.

#include <cstdio>

#include "softbound/softbound.hpp"

int main() {
    using namespace softbound;

    // Frame 1 looks like the start description, frame 4 like the end one.
    const EmbeddingMatrix video{{0.95, -0.3}, {1.0, 0.0}, {0.7, 0.7}, {0.7, 0.7}, {0.0, 1.0}, {-0.3, 0.95}};
    const supervision::QueryEmbeddings text{EmbeddingMatrix{{0.7, 0.7}}, EmbeddingMatrix{{1.0, 0.0}},
                                            EmbeddingMatrix{{0.0, 1.0}}};

    VideoRecord record;
    record.video_id = "demo";
    record.duration_sec = 12.0;
    record.clip_stride_sec = 2.0;
    record.annotation = {3.0, 9.0};  // frames 1..4
    record.query_text = "person closes the door";

    const auto target = supervision::generate_supervision(record, video, text, {});
    std::printf("s' = %zu, e' = %zu\n", target.s_prime, target.e_prime);
    for (std::size_t i = 0; i < target.probs.size(); ++i) std::printf("  p(%zu) = %.4f\n", i, target.probs[i]);

    const auto fused = fusion::enhance_video(video, text.start, text.query, text.end);
    const auto p_hat = losses::toy_boundary_head(fused, text.query, {});
    std::printf("boundary loss of the toy head: %.4f\n", losses::boundary_loss(target.probs, p_hat));
}
