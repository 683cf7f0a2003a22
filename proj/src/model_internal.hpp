#pragma once

// Shared internals between the forward pass and the training backward
// pass. Not installed; include only from src/.

#include "amp/tensor.hpp"

namespace amp::detail {

// Softmax over the first `valid` entries of a score row; the tail is set
// to exactly zero so a subsequent prob×V product adds exact no-op terms.
// Keeping one shared routine makes cached decoding bit-identical to
// full-sequence recomputation.
void softmax_causal_row(float* row, int valid, int total);

// Causal scaled dot-product attention for queries at absolute positions
// pos_offset..pos_offset+sq-1 against kv rows 0..kv_len-1. All buffers are
// [rows x n_heads*d_head]; the result lands in the matching column block
// of `concat`. `probs_out`, when given, receives the attention weights per
// head, laid out [n_heads][sq][kv_len].
void attend_causal(const Tensor& q, const float* k, const float* v,
                   int kv_len, int pos_offset, int n_heads, int d_head,
                   Tensor& concat, float* probs_out = nullptr);

}  // namespace amp::detail
