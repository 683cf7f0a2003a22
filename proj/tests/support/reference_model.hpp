// Double-precision, loop-by-loop reference implementation of the same
// transformer architecture, written independently of the library's kernels.
// Tests compare the production f32 path against this oracle.
#pragma once

#include <vector>

#include "amp/model.hpp"

namespace refmodel {

struct DMat {
    int rows = 0;
    int cols = 0;
    std::vector<double> d;

    DMat() = default;
    DMat(int r, int c) : rows(r), cols(c), d(static_cast<std::size_t>(r) * c, 0.0) {}
    double& at(int r, int c) { return d[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return d[static_cast<std::size_t>(r) * cols + c]; }
};

DMat from_tensor(const amp::Tensor& t);
DMat matmul(const DMat& a, const DMat& b);

// Everything the forward pass produces, per layer, in f64.
struct RefTrace {
    std::vector<DMat> layer_inputs;                 // x entering each layer
    std::vector<std::vector<DMat>> head_contribs;   // [layer][head], each S x d_model
    std::vector<DMat> down_inputs;                  // MLP activation before W_down
    DMat logits;                                    // S x vocab
};

RefTrace forward_trace(const amp::TransformerWeights& w, const std::vector<int>& tokens);
DMat forward_logits(const amp::TransformerWeights& w, const std::vector<int>& tokens);

// Mean next-token negative log-likelihood over the sequence.
double loss(const amp::TransformerWeights& w, const std::vector<int>& tokens);

}  // namespace refmodel
