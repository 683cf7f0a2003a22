#pragma once

// Desk-scale training and post-prune recovery: next-token cross-entropy
// with analytic gradients derived by hand for the fixed architecture,
// Adam with global-norm clipping. Single-worker and fully deterministic
// for a fixed seed, corpus and config.

#include <cstdint>
#include <iosfwd>

#include "amp/model.hpp"

namespace amp {

struct TrainConfig {
    int steps = 0;
    int batch_tokens = 512;  // window length per step, capped by max_seq_len
    float learning_rate = 3e-4f;
    float adam_beta1 = 0.9f;
    float adam_beta2 = 0.999f;
    float adam_eps = 1e-8f;
    float grad_clip = 1.0f;  // max global gradient norm; <= 0 disables
    std::uint64_t seed = 0;
    int eval_every = 50;  // loss-log cadence in steps

    void validate() const;
};

// Seeded init: matrices ~ N(0, 1/fan_in), norm gains 1. Same seed gives
// bit-identical weights on any platform (own Box-Muller, no
// std::*_distribution).
TransformerWeights init_weights(const ModelConfig& config, std::uint64_t seed);

struct LossAndGrads {
    double loss = 0.0;           // mean next-token cross-entropy, nats
    TransformerWeights grads;    // same shapes as the weights
};

// Mean cross-entropy of positions 1..S-1 predicting the next token, plus
// analytic gradients for every parameter tensor. Needs S >= 2.
LossAndGrads loss_and_grads(const TransformerWeights& w, const std::vector<int>& tokens);

// Adam training over seeded random corpus windows. Writes a
// "step,loss,tokens_seen" CSV to loss_csv when given. Aborts with
// TrainError if the loss goes non-finite.
TransformerWeights train(const TransformerWeights& w, const std::vector<int>& corpus,
                         const TrainConfig& cfg, std::ostream* loss_csv = nullptr);

// Post-prune fine-tuning: identical machinery to train, applied to a
// pruned model with every remaining parameter trainable.
TransformerWeights recover(const TransformerWeights& w_pruned,
                           const std::vector<int>& corpus, const TrainConfig& cfg,
                           std::ostream* loss_csv = nullptr);

}  // namespace amp
