#pragma once

// LLaMA-style decoder-only transformer: pre-norm RMSNorm, rotary position
// embeddings, causal multi-head attention, SwiGLU MLP, untied lm_head, no
// biases. Per-layer head/neuron counts may differ from the base config
// after structural surgery; Wo and Wdown always restore d_model, so the
// residual stream shape never changes.

#include <optional>
#include <string>
#include <vector>

#include "amp/tensor.hpp"

namespace amp {

struct ModelConfig {
    int vocab_size = 257;  // bytes + BOS
    int d_model = 64;
    int n_layers = 2;
    int n_heads = 4;         // base heads per layer
    int d_head = 16;         // per-head width, fixed under pruning
    int d_intermediate = 172;  // base MLP width
    int max_seq_len = 512;
    float rms_norm_eps = 1e-5f;
    float rope_theta = 10000.0f;

    // Throws ConfigError on inconsistent values (d_model != n_heads*d_head,
    // odd d_head, non-positive counts).
    void validate() const;
};

struct LayerWeights {
    Tensor attn_norm;          // [d_model]
    Tensor wq, wk, wv;         // [d_model x n_heads*d_head]
    Tensor wo;                 // [n_heads*d_head x d_model]
    Tensor mlp_norm;           // [d_model]
    Tensor w_gate, w_up;       // [d_model x d_intermediate]
    Tensor w_down;             // [d_intermediate x d_model]
    int n_heads = 0;           // heads remaining in this layer
    int d_intermediate = 0;    // up/gate pairs remaining in this layer
};

struct TransformerWeights {
    ModelConfig config;
    Tensor token_embedding;  // [vocab_size x d_model]
    std::vector<LayerWeights> layers;
    Tensor final_norm;  // [d_model]
    Tensor lm_head;     // [d_model x vocab_size]
};

// Checks every tensor shape against the config and per-layer dims; throws
// ShapeError naming the offending tensor.
void validate_weights(const TransformerWeights& w);

// Visits every parameter tensor in canonical checkpoint order with
// fn(name, tensor): token_embedding, layers.N.{attn_norm,Wq,Wk,Wv,Wo,
// mlp_norm,Wgate,Wup,Wdown}, final_norm, lm_head.
template <typename W, typename Fn>
void for_each_tensor(W& w, Fn&& fn) {
    fn(std::string("token_embedding"), w.token_embedding);
    for (std::size_t l = 0; l < w.layers.size(); ++l) {
        auto& lw = w.layers[l];
        const std::string p = "layers." + std::to_string(l) + ".";
        fn(p + "attn_norm", lw.attn_norm);
        fn(p + "Wq", lw.wq);
        fn(p + "Wk", lw.wk);
        fn(p + "Wv", lw.wv);
        fn(p + "Wo", lw.wo);
        fn(p + "mlp_norm", lw.mlp_norm);
        fn(p + "Wgate", lw.w_gate);
        fn(p + "Wup", lw.w_up);
        fn(p + "Wdown", lw.w_down);
    }
    fn(std::string("final_norm"), w.final_norm);
    fn(std::string("lm_head"), w.lm_head);
}

std::size_t parameter_count(const TransformerWeights& w);

// Parameters eligible for structural removal: per-layer Wq/Wk/Wv/Wo and
// Wgate/Wup/Wdown. Norms, embeddings and lm_head are never pruned.
std::size_t prunable_parameter_count(const TransformerWeights& w);

// Same shapes as w, all values zero. Used for gradient accumulators.
TransformerWeights zeros_like(const TransformerWeights& w);

// ---------------------------------------------------------------- layer ops

// Per-row RMS normalization with learned gain: y = x / rms(x) * gain.
Tensor rmsnorm_rows(const Tensor& x, const Tensor& gain, float eps);

// In-place rotary embedding on rows laid out as [rows x n_heads*d_head];
// row r is rotated at absolute position positions[r]. Adjacent dimension
// pairs within each head rotate together.
void rope_rotate(Tensor& t, const std::vector<int>& positions, int n_heads,
                 int d_head, float theta);

// Single attention head: projects x by the head's column blocks of
// Wq/Wk/Wv, applies RoPE at the given positions, causal mask, scaled
// dot-product attention. Returns [S x d_head].
Tensor attention_head(const Tensor& x, const LayerWeights& layer, int head,
                      const std::vector<int>& positions, int d_head,
                      float rope_theta);

// Full MHA block: concat of all heads times Wo. Positions are 0..S-1.
Tensor mha_standard(const Tensor& x, const LayerWeights& layer, int d_head,
                    float rope_theta);

struct MhaDecomposition {
    Tensor output;  // sum of head_contributions
    std::vector<Tensor> head_contributions;  // each [S x d_model]
};

// Head-decomposed MHA: head_contributions[n] = h_n * (n-th d_head-row
// block of Wo); output is their sum and matches mha_standard within
// rounding.
MhaDecomposition mha_decomposed(const Tensor& x, const LayerWeights& layer,
                                int d_head, float rope_theta);

struct MlpResult {
    Tensor output;
    std::optional<Tensor> down_input;  // SiLU(xWgate) ⊙ (xWup), if captured
};

MlpResult swiglu_mlp(const Tensor& x, const LayerWeights& layer, bool capture);

// ------------------------------------------------------------ full forward

struct LayerCapture {
    std::vector<Tensor> head_contribs;  // n_heads tensors [S x d_model]
    Tensor down_input;                  // [S x d_intermediate]
};

struct ForwardCapture {
    std::vector<LayerCapture> layers;
};

// Full-sequence forward pass; returns logits [S x vocab_size]. When
// capture is non-null the MHA runs decomposed and the MLP keeps its
// down-projection input, filling one LayerCapture per layer.
Tensor forward(const TransformerWeights& w, const std::vector<int>& tokens,
               ForwardCapture* capture = nullptr);

// Greedy argmax decoding with a KV cache; returns exactly n_new tokens.
// Ties pick the lowest token id. Produces the same tokens as full
// recomputation without a cache.
std::vector<int> generate(const TransformerWeights& w,
                          const std::vector<int>& prompt, int n_new);

}  // namespace amp
