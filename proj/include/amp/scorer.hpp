#pragma once

// Activation-magnitude importance scoring. Head importance is the l1 norm
// of the head's additive contribution to the MHA output, normalized per
// token; MLP pair importance is the token-averaged absolute value of the
// corresponding down-projection input coordinate. Per-sample scores are
// combined by an equal-weight mean over samples.

#include <string>
#include <vector>

#include "amp/model.hpp"

namespace amp {

struct LayerScores {
    std::vector<double> head_scores;  // length n_heads of that layer
    std::vector<double> mlp_scores;   // length d_intermediate of that layer
};

struct ImportanceReport {
    std::string model_fingerprint;
    int num_samples = 0;
    long long total_tokens = 0;
    std::vector<LayerScores> per_layer;
};

// Per-head score from one sample's contribution tensors: l1(contrib)/S.
std::vector<double> score_heads_layer(const std::vector<Tensor>& contribs);

// Per-pair score from one sample's captured down-projection input:
// column-wise mean absolute value over tokens.
std::vector<double> score_mlp_layer(const Tensor& down_input);

// One captured forward pass per calibration sample; scores averaged with
// equal weight per sample. Read-only on the model.
ImportanceReport compute_importance(const TransformerWeights& w,
                                    const std::vector<std::vector<int>>& calib);

// JSON round-trip: {version, model_fingerprint, num_samples, total_tokens,
// layers:[{head_scores, mlp_scores}]} with full-precision scores.
std::string report_to_json(const ImportanceReport& report);
ImportanceReport report_from_json(const std::string& text);

}  // namespace amp
