#include "amp/model.hpp"

#include <cmath>
#include <cstring>
#include <vector>

#include "amp/error.hpp"
#include "amp/kernels.hpp"
#include "model_internal.hpp"

namespace amp {

namespace detail {

void softmax_causal_row(float* row, int valid, int total) {
    float mx = row[0];
    for (int j = 1; j < valid; ++j) {
        if (row[j] > mx) mx = row[j];
    }
    double sum = 0.0;
    for (int j = 0; j < valid; ++j) {
        row[j] = std::exp(row[j] - mx);
        sum += row[j];
    }
    const float inv = static_cast<float>(1.0 / sum);
    for (int j = 0; j < valid; ++j) row[j] *= inv;
    for (int j = valid; j < total; ++j) row[j] = 0.0f;
}

void attend_causal(const Tensor& q, const float* k, const float* v,
                   int kv_len, int pos_offset, int n_heads, int d_head,
                   Tensor& concat, float* probs_out) {
    const int sq = q.rows();
    const int width = n_heads * d_head;
    const float scale = 1.0f / std::sqrt(static_cast<float>(d_head));
    std::vector<float> scores(static_cast<std::size_t>(sq) * kv_len);
    for (int h = 0; h < n_heads; ++h) {
        const int off = h * d_head;
        kernels::gemm_nt(q.data.data() + off, width, k + off, width,
                         scores.data(), kv_len, sq, d_head, kv_len);
        for (auto& s : scores) s *= scale;
        for (int i = 0; i < sq; ++i) {
            softmax_causal_row(scores.data() + static_cast<std::size_t>(i) * kv_len,
                               pos_offset + i + 1, kv_len);
        }
        if (probs_out) {
            std::memcpy(probs_out + static_cast<std::size_t>(h) * sq * kv_len,
                        scores.data(), scores.size() * sizeof(float));
        }
        kernels::gemm_nn(scores.data(), kv_len, v + off, width,
                         concat.data.data() + off, width, sq, kv_len, d_head);
    }
}

}  // namespace detail

using detail::attend_causal;

namespace {

void check_tokens(const std::vector<int>& tokens, int vocab_size) {
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (tokens[i] < 0 || tokens[i] >= vocab_size) {
            throw ConfigError("token id " + std::to_string(tokens[i]) +
                              " at position " + std::to_string(i) +
                              " out of range [0," + std::to_string(vocab_size) + ")");
        }
    }
}

// Per-layer KV buffers sized up front; rows fill as decoding advances.
struct KVCache {
    std::vector<std::vector<float>> k, v;
    int length = 0;
};

KVCache make_cache(const TransformerWeights& w, int capacity) {
    KVCache c;
    c.k.resize(w.layers.size());
    c.v.resize(w.layers.size());
    for (std::size_t l = 0; l < w.layers.size(); ++l) {
        const std::size_t n = static_cast<std::size_t>(capacity) *
                              w.layers[l].n_heads * w.config.d_head;
        c.k[l].assign(n, 0.0f);
        c.v[l].assign(n, 0.0f);
    }
    return c;
}

// Runs the residual stack over `tokens`, appending K/V to the cache.
// Returns hidden states [S x d_model] before the final norm. With
// `capture`, MHA runs decomposed and MLP down-projection inputs are kept.
Tensor run_stack(const TransformerWeights& w, const std::vector<int>& tokens,
                 KVCache& cache, ForwardCapture* capture) {
    const ModelConfig& cfg = w.config;
    const int s = static_cast<int>(tokens.size());
    const int pos_offset = cache.length;

    Tensor x({s, cfg.d_model});
    for (int i = 0; i < s; ++i) {
        std::memcpy(x.row(i), w.token_embedding.row(tokens[static_cast<std::size_t>(i)]),
                    static_cast<std::size_t>(cfg.d_model) * sizeof(float));
    }
    std::vector<int> positions(static_cast<std::size_t>(s));
    for (int i = 0; i < s; ++i) positions[static_cast<std::size_t>(i)] = pos_offset + i;

    for (std::size_t l = 0; l < w.layers.size(); ++l) {
        const LayerWeights& lw = w.layers[l];
        const int width = lw.n_heads * cfg.d_head;

        Tensor ln = rmsnorm_rows(x, lw.attn_norm, cfg.rms_norm_eps);
        Tensor q = matmul(ln, lw.wq);
        Tensor k = matmul(ln, lw.wk);
        Tensor v = matmul(ln, lw.wv);
        rope_rotate(q, positions, lw.n_heads, cfg.d_head, cfg.rope_theta);
        rope_rotate(k, positions, lw.n_heads, cfg.d_head, cfg.rope_theta);

        std::memcpy(cache.k[l].data() + static_cast<std::size_t>(pos_offset) * width,
                    k.data.data(), k.size() * sizeof(float));
        std::memcpy(cache.v[l].data() + static_cast<std::size_t>(pos_offset) * width,
                    v.data.data(), v.size() * sizeof(float));
        const int kv_len = pos_offset + s;

        Tensor concat({s, width});
        attend_causal(q, cache.k[l].data(), cache.v[l].data(), kv_len,
                      pos_offset, lw.n_heads, cfg.d_head, concat);

        Tensor attn_out;
        if (capture) {
            LayerCapture& lc = capture->layers[l];
            lc.head_contribs.clear();
            lc.head_contribs.reserve(static_cast<std::size_t>(lw.n_heads));
            attn_out = Tensor({s, cfg.d_model});
            for (int h = 0; h < lw.n_heads; ++h) {
                Tensor contrib({s, cfg.d_model});
                kernels::gemm_nn(concat.data.data() + h * cfg.d_head, width,
                                 lw.wo.data.data() +
                                     static_cast<std::size_t>(h) * cfg.d_head * cfg.d_model,
                                 cfg.d_model, contrib.data.data(), cfg.d_model,
                                 s, cfg.d_head, cfg.d_model);
                kernels::add(attn_out.data.data(), contrib.data.data(),
                             attn_out.data.data(), attn_out.size());
                lc.head_contribs.push_back(std::move(contrib));
            }
        } else {
            attn_out = matmul(concat, lw.wo);
        }
        x = elementwise_add(x, attn_out);

        Tensor ln2 = rmsnorm_rows(x, lw.mlp_norm, cfg.rms_norm_eps);
        MlpResult mlp = swiglu_mlp(ln2, lw, capture != nullptr);
        x = elementwise_add(x, mlp.output);
        if (capture) capture->layers[l].down_input = std::move(*mlp.down_input);
    }
    cache.length += s;
    return x;
}

// Final norm + lm_head for a single hidden row.
Tensor project_row(const TransformerWeights& w, const float* hidden) {
    Tensor h({1, w.config.d_model},
             std::vector<float>(hidden, hidden + w.config.d_model));
    return matmul(rmsnorm_rows(h, w.final_norm, w.config.rms_norm_eps), w.lm_head);
}

int argmax_lowest(const Tensor& row_logits) {
    const float* p = row_logits.data.data();
    int best = 0;
    for (int j = 1; j < static_cast<int>(row_logits.size()); ++j) {
        if (p[j] > p[best]) best = j;
    }
    return best;
}

}  // namespace

void ModelConfig::validate() const {
    auto positive = [](int v, const char* name) {
        if (v < 1) throw ConfigError(std::string(name) + " must be >= 1, got " + std::to_string(v));
    };
    positive(vocab_size, "vocab_size");
    positive(d_model, "d_model");
    positive(n_layers, "n_layers");
    positive(n_heads, "n_heads");
    positive(d_head, "d_head");
    positive(d_intermediate, "d_intermediate");
    positive(max_seq_len, "max_seq_len");
    if (vocab_size < 2) throw ConfigError("vocab_size must be >= 2");
    if (d_model != n_heads * d_head) {
        throw ConfigError("d_model (" + std::to_string(d_model) +
                          ") must equal n_heads*d_head (" +
                          std::to_string(n_heads * d_head) + ")");
    }
    if (d_head % 2 != 0) throw ConfigError("d_head must be even for rotary embeddings");
    if (!(rms_norm_eps > 0.0f)) throw ConfigError("rms_norm_eps must be > 0");
    if (!(rope_theta > 0.0f)) throw ConfigError("rope_theta must be > 0");
}

void validate_weights(const TransformerWeights& w) {
    const ModelConfig& cfg = w.config;
    cfg.validate();
    if (static_cast<int>(w.layers.size()) != cfg.n_layers) {
        throw ShapeError("layer count " + std::to_string(w.layers.size()) +
                         " does not match config n_layers " + std::to_string(cfg.n_layers));
    }
    auto check = [](const Tensor& t, std::vector<int> want, const std::string& name) {
        if (t.shape != want) {
            throw ShapeError(name + ": expected shape " + Tensor(std::move(want)).shape_str() +
                             ", got " + t.shape_str());
        }
    };
    check(w.token_embedding, {cfg.vocab_size, cfg.d_model}, "token_embedding");
    for (std::size_t l = 0; l < w.layers.size(); ++l) {
        const LayerWeights& lw = w.layers[l];
        const std::string p = "layers." + std::to_string(l) + ".";
        if (lw.n_heads < 1) throw ShapeError(p + "n_heads must be >= 1");
        if (lw.d_intermediate < 1) throw ShapeError(p + "d_intermediate must be >= 1");
        if (lw.n_heads > cfg.n_heads) {
            throw ShapeError(p + "n_heads exceeds base config n_heads");
        }
        const int width = lw.n_heads * cfg.d_head;
        check(lw.attn_norm, {cfg.d_model}, p + "attn_norm");
        check(lw.wq, {cfg.d_model, width}, p + "Wq");
        check(lw.wk, {cfg.d_model, width}, p + "Wk");
        check(lw.wv, {cfg.d_model, width}, p + "Wv");
        check(lw.wo, {width, cfg.d_model}, p + "Wo");
        check(lw.mlp_norm, {cfg.d_model}, p + "mlp_norm");
        check(lw.w_gate, {cfg.d_model, lw.d_intermediate}, p + "Wgate");
        check(lw.w_up, {cfg.d_model, lw.d_intermediate}, p + "Wup");
        check(lw.w_down, {lw.d_intermediate, cfg.d_model}, p + "Wdown");
    }
    check(w.final_norm, {cfg.d_model}, "final_norm");
    check(w.lm_head, {cfg.d_model, cfg.vocab_size}, "lm_head");
}

std::size_t parameter_count(const TransformerWeights& w) {
    std::size_t n = 0;
    for_each_tensor(w, [&](const std::string&, const Tensor& t) { n += t.size(); });
    return n;
}

std::size_t prunable_parameter_count(const TransformerWeights& w) {
    std::size_t n = 0;
    for (const LayerWeights& lw : w.layers) {
        n += lw.wq.size() + lw.wk.size() + lw.wv.size() + lw.wo.size();
        n += lw.w_gate.size() + lw.w_up.size() + lw.w_down.size();
    }
    return n;
}

TransformerWeights zeros_like(const TransformerWeights& w) {
    TransformerWeights z = w;
    for_each_tensor(z, [](const std::string&, Tensor& t) {
        std::fill(t.data.begin(), t.data.end(), 0.0f);
    });
    return z;
}

Tensor rmsnorm_rows(const Tensor& x, const Tensor& gain, float eps) {
    if (x.rank() != 2 || gain.rank() != 1 || x.cols() != gain.dim(0)) {
        throw ShapeError("rmsnorm_rows: incompatible shapes " + x.shape_str() +
                         " and " + gain.shape_str());
    }
    const int m = x.rows(), n = x.cols();
    Tensor out(x.shape);
    for (int i = 0; i < m; ++i) {
        const float* xi = x.row(i);
        float* yi = out.row(i);
        double ms = 0.0;
        for (int j = 0; j < n; ++j) ms += static_cast<double>(xi[j]) * xi[j];
        const float r = static_cast<float>(1.0 / std::sqrt(ms / n + eps));
        for (int j = 0; j < n; ++j) yi[j] = xi[j] * r * gain.data[static_cast<std::size_t>(j)];
    }
    return out;
}

void rope_rotate(Tensor& t, const std::vector<int>& positions, int n_heads,
                 int d_head, float theta) {
    const int rows = t.rows();
    if (static_cast<int>(positions.size()) != rows) {
        throw ShapeError("rope_rotate: positions length " + std::to_string(positions.size()) +
                         " does not match rows " + std::to_string(rows));
    }
    const int half = d_head / 2;
    std::vector<double> freq(static_cast<std::size_t>(half));
    for (int p = 0; p < half; ++p) {
        freq[static_cast<std::size_t>(p)] =
            std::pow(static_cast<double>(theta), -2.0 * p / d_head);
    }
    for (int r = 0; r < rows; ++r) {
        float* row = t.row(r);
        const double pos = positions[static_cast<std::size_t>(r)];
        for (int h = 0; h < n_heads; ++h) {
            float* hp = row + h * d_head;
            for (int p = 0; p < half; ++p) {
                const double a = pos * freq[static_cast<std::size_t>(p)];
                const float c = static_cast<float>(std::cos(a));
                const float s = static_cast<float>(std::sin(a));
                const float x0 = hp[2 * p], x1 = hp[2 * p + 1];
                hp[2 * p] = x0 * c - x1 * s;
                hp[2 * p + 1] = x0 * s + x1 * c;
            }
        }
    }
}

Tensor attention_head(const Tensor& x, const LayerWeights& layer, int head,
                      const std::vector<int>& positions, int d_head,
                      float rope_theta) {
    if (head < 0 || head >= layer.n_heads) {
        throw ShapeError("head index " + std::to_string(head) + " out of range [0," +
                         std::to_string(layer.n_heads) + ")");
    }
    const int s = x.rows(), d_model = x.cols();
    const int width = layer.n_heads * d_head;
    const int off = head * d_head;
    auto project = [&](const Tensor& wmat) {
        Tensor out({s, d_head});
        kernels::gemm_nn(x.data.data(), d_model, wmat.data.data() + off, width,
                         out.data.data(), d_head, s, d_model, d_head);
        return out;
    };
    Tensor q = project(layer.wq), k = project(layer.wk), v = project(layer.wv);
    rope_rotate(q, positions, 1, d_head, rope_theta);
    rope_rotate(k, positions, 1, d_head, rope_theta);
    Tensor out({s, d_head});
    attend_causal(q, k.data.data(), v.data.data(), s, 0, 1, d_head, out);
    return out;
}

Tensor mha_standard(const Tensor& x, const LayerWeights& layer, int d_head,
                    float rope_theta) {
    const int s = x.rows();
    std::vector<int> positions(static_cast<std::size_t>(s));
    for (int i = 0; i < s; ++i) positions[static_cast<std::size_t>(i)] = i;

    Tensor q = matmul(x, layer.wq);
    Tensor k = matmul(x, layer.wk);
    Tensor v = matmul(x, layer.wv);
    rope_rotate(q, positions, layer.n_heads, d_head, rope_theta);
    rope_rotate(k, positions, layer.n_heads, d_head, rope_theta);
    Tensor concat({s, layer.n_heads * d_head});
    attend_causal(q, k.data.data(), v.data.data(), s, 0, layer.n_heads, d_head, concat);
    return matmul(concat, layer.wo);
}

MhaDecomposition mha_decomposed(const Tensor& x, const LayerWeights& layer,
                                int d_head, float rope_theta) {
    const int s = x.rows();
    const int d_model = layer.wo.cols();
    const int width = layer.n_heads * d_head;
    std::vector<int> positions(static_cast<std::size_t>(s));
    for (int i = 0; i < s; ++i) positions[static_cast<std::size_t>(i)] = i;

    Tensor q = matmul(x, layer.wq);
    Tensor k = matmul(x, layer.wk);
    Tensor v = matmul(x, layer.wv);
    rope_rotate(q, positions, layer.n_heads, d_head, rope_theta);
    rope_rotate(k, positions, layer.n_heads, d_head, rope_theta);
    Tensor concat({s, width});
    attend_causal(q, k.data.data(), v.data.data(), s, 0, layer.n_heads, d_head, concat);

    MhaDecomposition out;
    out.output = Tensor({s, d_model});
    out.head_contributions.reserve(static_cast<std::size_t>(layer.n_heads));
    for (int h = 0; h < layer.n_heads; ++h) {
        Tensor contrib({s, d_model});
        kernels::gemm_nn(concat.data.data() + h * d_head, width,
                         layer.wo.data.data() + static_cast<std::size_t>(h) * d_head * d_model,
                         d_model, contrib.data.data(), d_model, s, d_head, d_model);
        kernels::add(out.output.data.data(), contrib.data.data(),
                     out.output.data.data(), out.output.size());
        out.head_contributions.push_back(std::move(contrib));
    }
    return out;
}

MlpResult swiglu_mlp(const Tensor& x, const LayerWeights& layer, bool capture) {
    Tensor act = elementwise_mul(silu(matmul(x, layer.w_gate)), matmul(x, layer.w_up));
    MlpResult out;
    out.output = matmul(act, layer.w_down);
    if (capture) out.down_input = std::move(act);
    return out;
}

Tensor forward(const TransformerWeights& w, const std::vector<int>& tokens,
               ForwardCapture* capture) {
    validate_weights(w);
    const int s = static_cast<int>(tokens.size());
    if (s < 1) throw ConfigError("forward requires at least one token");
    if (s > w.config.max_seq_len) {
        throw ConfigError("sequence length " + std::to_string(s) +
                          " exceeds max_seq_len " + std::to_string(w.config.max_seq_len));
    }
    check_tokens(tokens, w.config.vocab_size);
    if (capture) {
        capture->layers.clear();
        capture->layers.resize(w.layers.size());
    }
    KVCache cache = make_cache(w, s);
    Tensor hidden = run_stack(w, tokens, cache, capture);
    return matmul(rmsnorm_rows(hidden, w.final_norm, w.config.rms_norm_eps), w.lm_head);
}

std::vector<int> generate(const TransformerWeights& w,
                          const std::vector<int>& prompt, int n_new) {
    validate_weights(w);
    if (prompt.empty()) throw ConfigError("generate requires a nonempty prompt");
    if (n_new < 0) throw ConfigError("n_new must be >= 0");
    const int total = static_cast<int>(prompt.size()) + n_new;
    if (total > w.config.max_seq_len) {
        throw ConfigError("context overflow: prompt + n_new = " + std::to_string(total) +
                          " exceeds max_seq_len " + std::to_string(w.config.max_seq_len));
    }
    check_tokens(prompt, w.config.vocab_size);
    std::vector<int> out;
    if (n_new == 0) return out;
    out.reserve(static_cast<std::size_t>(n_new));

    KVCache cache = make_cache(w, total);
    Tensor hidden = run_stack(w, prompt, cache, nullptr);
    int tok = argmax_lowest(project_row(w, hidden.row(hidden.rows() - 1)));
    out.push_back(tok);
    while (static_cast<int>(out.size()) < n_new) {
        Tensor h = run_stack(w, {tok}, cache, nullptr);
        tok = argmax_lowest(project_row(w, h.row(0)));
        out.push_back(tok);
    }
    return out;
}

}  // namespace amp
