#include "amp/trainer.hpp"

#include <cmath>
#include <cstring>
#include <iomanip>
#include <ostream>
#include <random>
#include <vector>

#include "amp/error.hpp"
#include "amp/kernels.hpp"
#include "model_internal.hpp"

namespace amp {

namespace {

// Uniform double in [0,1) from the top 53 bits of a mt19937_64 draw;
// avoids std::uniform_real_distribution, whose output is
// implementation-defined.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Box-Muller standard normal; explicit so initialization is reproducible
// across standard libraries.
double gaussian(std::mt19937_64& rng) {
    double u1 = uniform01(rng);
    while (u1 <= 0.0) u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

void fill_gaussian(Tensor& t, double scale, std::mt19937_64& rng) {
    for (float& v : t.data) v = static_cast<float>(gaussian(rng) * scale);
}

// Numerically stable log-sum-exp of a float logit row, in double.
double row_lse(const float* x, int n, float& max_out) {
    float mx = x[0];
    for (int j = 1; j < n; ++j) {
        if (x[j] > mx) mx = x[j];
    }
    double sum = 0.0;
    for (int j = 0; j < n; ++j) sum += std::exp(static_cast<double>(x[j]) - mx);
    max_out = mx;
    return std::log(sum);
}

// Everything the backward pass needs, captured during the forward pass.
struct LayerActs {
    Tensor x_in;       // residual entering the layer
    Tensor xn_attn;    // rmsnorm(x_in, attn_norm)
    std::vector<float> rstd_attn;  // per-row 1/rms for that norm
    Tensor q, k, v;    // post-RoPE projections [S x width]
    Tensor probs;      // attention weights [n_heads x S x S]
    Tensor concat;     // per-head outputs [S x width]
    Tensor x_mid;      // residual after attention
    Tensor xn_mlp;     // rmsnorm(x_mid, mlp_norm)
    std::vector<float> rstd_mlp;
    Tensor gate_pre;   // xn_mlp * Wgate
    Tensor silu_gate;  // SiLU(gate_pre)
    Tensor up;         // xn_mlp * Wup
    Tensor act;        // silu_gate ⊙ up
};

struct ForwardActs {
    std::vector<LayerActs> layers;
    Tensor x_final;               // residual after the last layer
    Tensor hn;                    // rmsnorm(x_final, final_norm)
    std::vector<float> rstd_final;
    Tensor logits;
};

// rmsnorm that also records the per-row reciprocal RMS for backward use.
Tensor rmsnorm_fwd(const Tensor& x, const Tensor& gain, float eps,
                   std::vector<float>& rstd) {
    const int m = x.rows(), n = x.cols();
    rstd.resize(static_cast<std::size_t>(m));
    Tensor out(x.shape);
    for (int i = 0; i < m; ++i) {
        const float* xi = x.row(i);
        float* yi = out.row(i);
        double ms = 0.0;
        for (int j = 0; j < n; ++j) ms += static_cast<double>(xi[j]) * xi[j];
        const float r = static_cast<float>(1.0 / std::sqrt(ms / n + eps));
        rstd[static_cast<std::size_t>(i)] = r;
        for (int j = 0; j < n; ++j) yi[j] = xi[j] * r * gain.data[static_cast<std::size_t>(j)];
    }
    return out;
}

// dgain += dy ⊙ x ⊙ r; dx (+)= r·g·dy − r³·x·(Σ dy·g·x)/d.
void rmsnorm_bwd(const Tensor& x, const std::vector<float>& rstd, const Tensor& gain,
                 const Tensor& dy, Tensor& dgain, Tensor& dx, bool accumulate_dx) {
    const int m = x.rows(), n = x.cols();
    for (int i = 0; i < m; ++i) {
        const float* xi = x.row(i);
        const float* dyi = dy.row(i);
        float* dxi = dx.row(i);
        const float r = rstd[static_cast<std::size_t>(i)];
        double t = 0.0;
        for (int j = 0; j < n; ++j) {
            t += static_cast<double>(dyi[j]) * gain.data[static_cast<std::size_t>(j)] * xi[j];
        }
        const float k = static_cast<float>(r * static_cast<double>(r) * r * t / n);
        for (int j = 0; j < n; ++j) {
            const float g = gain.data[static_cast<std::size_t>(j)];
            const float val = r * g * dyi[j] - k * xi[j];
            dxi[j] = accumulate_dx ? dxi[j] + val : val;
            dgain.data[static_cast<std::size_t>(j)] += dyi[j] * xi[j] * r;
        }
    }
}

// Inverse rotary rotation (rotate by the negated angle); used to pull
// gradients back through RoPE.
void rope_rotate_inverse(Tensor& t, const std::vector<int>& positions, int n_heads,
                         int d_head, float theta) {
    const int rows = t.rows();
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
                hp[2 * p] = x0 * c + x1 * s;
                hp[2 * p + 1] = -x0 * s + x1 * c;
            }
        }
    }
}

// Forward pass that mirrors the inference stack op for op (same kernels,
// same order) while keeping every intermediate needed by backward.
ForwardActs forward_acts(const TransformerWeights& w, const std::vector<int>& tokens) {
    const ModelConfig& cfg = w.config;
    const int s = static_cast<int>(tokens.size());
    std::vector<int> positions(static_cast<std::size_t>(s));
    for (int i = 0; i < s; ++i) positions[static_cast<std::size_t>(i)] = i;

    ForwardActs fa;
    fa.layers.resize(w.layers.size());
    Tensor x({s, cfg.d_model});
    for (int i = 0; i < s; ++i) {
        std::memcpy(x.row(i), w.token_embedding.row(tokens[static_cast<std::size_t>(i)]),
                    static_cast<std::size_t>(cfg.d_model) * sizeof(float));
    }
    for (std::size_t l = 0; l < w.layers.size(); ++l) {
        const LayerWeights& lw = w.layers[l];
        LayerActs& la = fa.layers[l];
        const int width = lw.n_heads * cfg.d_head;

        la.x_in = x;
        la.xn_attn = rmsnorm_fwd(la.x_in, lw.attn_norm, cfg.rms_norm_eps, la.rstd_attn);
        la.q = matmul(la.xn_attn, lw.wq);
        la.k = matmul(la.xn_attn, lw.wk);
        la.v = matmul(la.xn_attn, lw.wv);
        rope_rotate(la.q, positions, lw.n_heads, cfg.d_head, cfg.rope_theta);
        rope_rotate(la.k, positions, lw.n_heads, cfg.d_head, cfg.rope_theta);

        la.probs = Tensor({lw.n_heads, s, s});
        la.concat = Tensor({s, width});
        detail::attend_causal(la.q, la.k.data.data(), la.v.data.data(), s, 0,
                              lw.n_heads, cfg.d_head, la.concat, la.probs.data.data());
        Tensor attn_out = matmul(la.concat, lw.wo);
        la.x_mid = elementwise_add(la.x_in, attn_out);

        la.xn_mlp = rmsnorm_fwd(la.x_mid, lw.mlp_norm, cfg.rms_norm_eps, la.rstd_mlp);
        la.gate_pre = matmul(la.xn_mlp, lw.w_gate);
        la.silu_gate = silu(la.gate_pre);
        la.up = matmul(la.xn_mlp, lw.w_up);
        la.act = elementwise_mul(la.silu_gate, la.up);
        Tensor mlp_out = matmul(la.act, lw.w_down);
        x = elementwise_add(la.x_mid, mlp_out);
    }
    fa.x_final = x;
    fa.hn = rmsnorm_fwd(fa.x_final, w.final_norm, cfg.rms_norm_eps, fa.rstd_final);
    fa.logits = matmul(fa.hn, w.lm_head);
    return fa;
}

}  // namespace

void TrainConfig::validate() const {
    if (steps < 0) throw ConfigError("steps must be >= 0");
    if (batch_tokens < 2) throw ConfigError("batch_tokens must be >= 2");
    if (!(learning_rate > 0.0f)) throw ConfigError("learning_rate must be > 0");
    if (!(adam_beta1 > 0.0f && adam_beta1 < 1.0f) ||
        !(adam_beta2 > 0.0f && adam_beta2 < 1.0f)) {
        throw ConfigError("adam betas must lie in (0,1)");
    }
    if (!(adam_eps > 0.0f)) throw ConfigError("adam_eps must be > 0");
    if (eval_every < 1) throw ConfigError("eval_every must be >= 1");
}

TransformerWeights init_weights(const ModelConfig& config, std::uint64_t seed) {
    config.validate();
    std::mt19937_64 rng(seed);
    TransformerWeights w;
    w.config = config;
    const int width = config.n_heads * config.d_head;

    w.token_embedding = Tensor({config.vocab_size, config.d_model});
    fill_gaussian(w.token_embedding, 1.0 / std::sqrt(config.d_model), rng);
    w.layers.resize(static_cast<std::size_t>(config.n_layers));
    for (LayerWeights& lw : w.layers) {
        lw.n_heads = config.n_heads;
        lw.d_intermediate = config.d_intermediate;
        lw.attn_norm = Tensor({config.d_model});
        std::fill(lw.attn_norm.data.begin(), lw.attn_norm.data.end(), 1.0f);
        lw.mlp_norm = lw.attn_norm;
        lw.wq = Tensor({config.d_model, width});
        lw.wk = Tensor({config.d_model, width});
        lw.wv = Tensor({config.d_model, width});
        lw.wo = Tensor({width, config.d_model});
        const double s1 = 1.0 / std::sqrt(config.d_model);
        fill_gaussian(lw.wq, s1, rng);
        fill_gaussian(lw.wk, s1, rng);
        fill_gaussian(lw.wv, s1, rng);
        fill_gaussian(lw.wo, 1.0 / std::sqrt(width), rng);
        lw.w_gate = Tensor({config.d_model, config.d_intermediate});
        lw.w_up = Tensor({config.d_model, config.d_intermediate});
        lw.w_down = Tensor({config.d_intermediate, config.d_model});
        fill_gaussian(lw.w_gate, s1, rng);
        fill_gaussian(lw.w_up, s1, rng);
        fill_gaussian(lw.w_down, 1.0 / std::sqrt(config.d_intermediate), rng);
    }
    w.final_norm = Tensor({config.d_model});
    std::fill(w.final_norm.data.begin(), w.final_norm.data.end(), 1.0f);
    w.lm_head = Tensor({config.d_model, config.vocab_size});
    fill_gaussian(w.lm_head, 1.0 / std::sqrt(config.d_model), rng);
    return w;
}

LossAndGrads loss_and_grads(const TransformerWeights& w, const std::vector<int>& tokens) {
    validate_weights(w);
    const ModelConfig& cfg = w.config;
    const int s = static_cast<int>(tokens.size());
    if (s < 2) throw TrainError("loss needs at least 2 tokens, got " + std::to_string(s));
    if (s > cfg.max_seq_len) {
        throw TrainError("sequence length " + std::to_string(s) + " exceeds max_seq_len " +
                         std::to_string(cfg.max_seq_len));
    }
    for (int t : tokens) {
        if (t < 0 || t >= cfg.vocab_size) {
            throw TrainError("token id " + std::to_string(t) + " out of range");
        }
    }

    ForwardActs fa = forward_acts(w, tokens);
    const int n_pred = s - 1;
    const int vocab = cfg.vocab_size;

    LossAndGrads out;
    out.grads = zeros_like(w);
    TransformerWeights& g = out.grads;

    // Loss and dlogits: rows 0..S-2 predict the next token; the last row
    // has no target and gets zero gradient.
    Tensor dlogits({s, vocab});
    double total_nll = 0.0;
    for (int i = 0; i < n_pred; ++i) {
        const float* row = fa.logits.row(i);
        float mx = 0.0f;
        const double lse = row_lse(row, vocab, mx);
        const int target = tokens[static_cast<std::size_t>(i) + 1];
        total_nll += lse - (static_cast<double>(row[target]) - mx);
        float* drow = dlogits.row(i);
        for (int j = 0; j < vocab; ++j) {
            const double p = std::exp(static_cast<double>(row[j]) - mx - lse);
            drow[j] = static_cast<float>(p / n_pred);
        }
        drow[target] -= 1.0f / static_cast<float>(n_pred);
    }
    out.loss = total_nll / n_pred;

    // lm_head and final norm.
    kernels::gemm_tn(fa.hn.data.data(), cfg.d_model, dlogits.data.data(), vocab,
                     g.lm_head.data.data(), vocab, cfg.d_model, s, vocab, true);
    Tensor dhn({s, cfg.d_model});
    kernels::gemm_nt(dlogits.data.data(), vocab, w.lm_head.data.data(), vocab,
                     dhn.data.data(), cfg.d_model, s, vocab, cfg.d_model);
    Tensor dx({s, cfg.d_model});
    rmsnorm_bwd(fa.x_final, fa.rstd_final, w.final_norm, dhn, g.final_norm, dx, false);

    std::vector<int> positions(static_cast<std::size_t>(s));
    for (int i = 0; i < s; ++i) positions[static_cast<std::size_t>(i)] = i;

    for (int l = static_cast<int>(w.layers.size()) - 1; l >= 0; --l) {
        const LayerWeights& lw = w.layers[static_cast<std::size_t>(l)];
        LayerWeights& gl = g.layers[static_cast<std::size_t>(l)];
        const LayerActs& la = fa.layers[static_cast<std::size_t>(l)];
        const int width = lw.n_heads * cfg.d_head;
        const int d_i = lw.d_intermediate;

        // ---- MLP branch: x = x_mid + act·Wdown
        kernels::gemm_tn(la.act.data.data(), d_i, dx.data.data(), cfg.d_model,
                         gl.w_down.data.data(), cfg.d_model, d_i, s, cfg.d_model, true);
        Tensor dact({s, d_i});
        kernels::gemm_nt(dx.data.data(), cfg.d_model, lw.w_down.data.data(), cfg.d_model,
                         dact.data.data(), d_i, s, cfg.d_model, d_i);

        Tensor dup({s, d_i}), dgate({s, d_i});
        for (std::size_t i = 0; i < dact.size(); ++i) {
            const float gp = la.gate_pre.data[i];
            const float sg = 1.0f / (1.0f + std::exp(-gp));
            const float dsilu = sg * (1.0f + gp * (1.0f - sg));
            dup.data[i] = dact.data[i] * la.silu_gate.data[i];
            dgate.data[i] = dact.data[i] * la.up.data[i] * dsilu;
        }
        kernels::gemm_tn(la.xn_mlp.data.data(), cfg.d_model, dup.data.data(), d_i,
                         gl.w_up.data.data(), d_i, cfg.d_model, s, d_i, true);
        kernels::gemm_tn(la.xn_mlp.data.data(), cfg.d_model, dgate.data.data(), d_i,
                         gl.w_gate.data.data(), d_i, cfg.d_model, s, d_i, true);
        Tensor dxn({s, cfg.d_model});
        kernels::gemm_nt(dup.data.data(), d_i, lw.w_up.data.data(), d_i,
                         dxn.data.data(), cfg.d_model, s, d_i, cfg.d_model);
        kernels::gemm_nt(dgate.data.data(), d_i, lw.w_gate.data.data(), d_i,
                         dxn.data.data(), cfg.d_model, s, d_i, cfg.d_model, true);
        // dx currently holds d(x_out); the residual passes it straight to
        // x_mid, plus the path through the MLP norm.
        rmsnorm_bwd(la.x_mid, la.rstd_mlp, lw.mlp_norm, dxn, gl.mlp_norm, dx, true);

        // ---- attention branch: x_mid = x_in + concat·Wo
        kernels::gemm_tn(la.concat.data.data(), width, dx.data.data(), cfg.d_model,
                         gl.wo.data.data(), cfg.d_model, width, s, cfg.d_model, true);
        Tensor dconcat({s, width});
        kernels::gemm_nt(dx.data.data(), cfg.d_model, lw.wo.data.data(), cfg.d_model,
                         dconcat.data.data(), width, s, cfg.d_model, width);

        Tensor dq({s, width}), dk({s, width}), dv({s, width});
        Tensor dp({s, s});
        const float scale = 1.0f / std::sqrt(static_cast<float>(cfg.d_head));
        for (int h = 0; h < lw.n_heads; ++h) {
            const int off = h * cfg.d_head;
            const float* ph =
                la.probs.data.data() + static_cast<std::size_t>(h) * s * s;
            // dP = dH·Vᵀ
            kernels::gemm_nt(dconcat.data.data() + off, width, la.v.data.data() + off,
                             width, dp.data.data(), s, s, cfg.d_head, s);
            // dV = Pᵀ·dH
            kernels::gemm_tn(ph, s, dconcat.data.data() + off, width,
                             dv.data.data() + off, width, s, s, cfg.d_head);
            // softmax backward, in place on dp: dZ = P ⊙ (dP − Σ dP⊙P),
            // then the 1/√d_head score scaling.
            for (int i = 0; i < s; ++i) {
                const int valid = i + 1;
                float* dpi = dp.row(i);
                const float* pi = ph + static_cast<std::size_t>(i) * s;
                double t = 0.0;
                for (int j = 0; j < valid; ++j) t += static_cast<double>(dpi[j]) * pi[j];
                const float tf = static_cast<float>(t);
                for (int j = 0; j < valid; ++j) dpi[j] = pi[j] * (dpi[j] - tf) * scale;
                for (int j = valid; j < s; ++j) dpi[j] = 0.0f;
            }
            // dQ̂ = dZ·K̂, dK̂ = dZᵀ·Q̂
            kernels::gemm_nn(dp.data.data(), s, la.k.data.data() + off, width,
                             dq.data.data() + off, width, s, s, cfg.d_head);
            kernels::gemm_tn(dp.data.data(), s, la.q.data.data() + off, width,
                             dk.data.data() + off, width, s, s, cfg.d_head);
        }
        rope_rotate_inverse(dq, positions, lw.n_heads, cfg.d_head, cfg.rope_theta);
        rope_rotate_inverse(dk, positions, lw.n_heads, cfg.d_head, cfg.rope_theta);

        kernels::gemm_tn(la.xn_attn.data.data(), cfg.d_model, dq.data.data(), width,
                         gl.wq.data.data(), width, cfg.d_model, s, width, true);
        kernels::gemm_tn(la.xn_attn.data.data(), cfg.d_model, dk.data.data(), width,
                         gl.wk.data.data(), width, cfg.d_model, s, width, true);
        kernels::gemm_tn(la.xn_attn.data.data(), cfg.d_model, dv.data.data(), width,
                         gl.wv.data.data(), width, cfg.d_model, s, width, true);
        Tensor dxn_attn({s, cfg.d_model});
        kernels::gemm_nt(dq.data.data(), width, lw.wq.data.data(), width,
                         dxn_attn.data.data(), cfg.d_model, s, width, cfg.d_model);
        kernels::gemm_nt(dk.data.data(), width, lw.wk.data.data(), width,
                         dxn_attn.data.data(), cfg.d_model, s, width, cfg.d_model, true);
        kernels::gemm_nt(dv.data.data(), width, lw.wv.data.data(), width,
                         dxn_attn.data.data(), cfg.d_model, s, width, cfg.d_model, true);
        rmsnorm_bwd(la.x_in, la.rstd_attn, lw.attn_norm, dxn_attn, gl.attn_norm, dx, true);
    }

    // Embedding rows gather the residual gradient by token id.
    for (int i = 0; i < s; ++i) {
        float* dst = g.token_embedding.row(tokens[static_cast<std::size_t>(i)]);
        const float* src = dx.row(i);
        for (int j = 0; j < cfg.d_model; ++j) dst[j] += src[j];
    }
    return out;
}

namespace {

struct AdamState {
    std::vector<std::vector<float>> m, v;
    long long t = 0;
};

AdamState make_adam(const TransformerWeights& w) {
    AdamState st;
    for_each_tensor(w, [&](const std::string&, const Tensor& t) {
        st.m.emplace_back(t.size(), 0.0f);
        st.v.emplace_back(t.size(), 0.0f);
    });
    return st;
}

double global_grad_norm(const TransformerWeights& grads) {
    double sq = 0.0;
    for_each_tensor(grads, [&](const std::string&, const Tensor& t) {
        for (float v : t.data) sq += static_cast<double>(v) * v;
    });
    return std::sqrt(sq);
}

void adam_step(TransformerWeights& w, TransformerWeights& grads, AdamState& st,
               const TrainConfig& cfg) {
    if (cfg.grad_clip > 0.0f) {
        const double norm = global_grad_norm(grads);
        if (norm > cfg.grad_clip) {
            const double scale = cfg.grad_clip / norm;
            for_each_tensor(grads, [&](const std::string&, Tensor& t) {
                for (float& v : t.data) v = static_cast<float>(v * scale);
            });
        }
    }
    st.t += 1;
    const double b1 = cfg.adam_beta1, b2 = cfg.adam_beta2;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(st.t));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(st.t));
    std::vector<Tensor*> wt, gt;
    for_each_tensor(w, [&](const std::string&, Tensor& t) { wt.push_back(&t); });
    for_each_tensor(grads, [&](const std::string&, Tensor& t) { gt.push_back(&t); });
    for (std::size_t slot = 0; slot < wt.size(); ++slot) {
        std::vector<float>& m = st.m[slot];
        std::vector<float>& v = st.v[slot];
        std::vector<float>& param = wt[slot]->data;
        const std::vector<float>& grad = gt[slot]->data;
        for (std::size_t i = 0; i < param.size(); ++i) {
            const double gi = grad[i];
            const double mi = b1 * m[i] + (1.0 - b1) * gi;
            const double vi = b2 * v[i] + (1.0 - b2) * gi * gi;
            m[i] = static_cast<float>(mi);
            v[i] = static_cast<float>(vi);
            const double update = cfg.learning_rate * (mi / bc1) /
                                  (std::sqrt(vi / bc2) + cfg.adam_eps);
            param[i] = static_cast<float>(param[i] - update);
        }
    }
}

TransformerWeights run_training(const TransformerWeights& start,
                                const std::vector<int>& corpus, const TrainConfig& cfg,
                                std::ostream* loss_csv) {
    cfg.validate();
    validate_weights(start);
    TransformerWeights w = start;
    if (cfg.steps == 0) return w;

    const int window = std::min(cfg.batch_tokens, w.config.max_seq_len);
    if (static_cast<int>(corpus.size()) < window) {
        throw TrainError("corpus has " + std::to_string(corpus.size()) +
                         " tokens, need at least " + std::to_string(window));
    }
    std::mt19937_64 rng(cfg.seed);
    AdamState adam = make_adam(w);
    long long tokens_seen = 0;
    if (loss_csv) *loss_csv << "step,loss,tokens_seen\n";

    for (int step = 1; step <= cfg.steps; ++step) {
        const std::uint64_t span = corpus.size() - static_cast<std::uint64_t>(window) + 1;
        const std::size_t offset = static_cast<std::size_t>(rng() % span);
        const std::vector<int> batch(corpus.begin() + static_cast<std::ptrdiff_t>(offset),
                                     corpus.begin() + static_cast<std::ptrdiff_t>(offset) + window);
        LossAndGrads lg = loss_and_grads(w, batch);
        if (!std::isfinite(lg.loss)) {
            throw TrainError("divergence: loss is not finite at step " + std::to_string(step));
        }
        tokens_seen += window - 1;
        if (loss_csv && (step % cfg.eval_every == 0 || step == cfg.steps || step == 1)) {
            *loss_csv << step << ',' << std::setprecision(10) << lg.loss << ','
                      << tokens_seen << '\n';
        }
        adam_step(w, lg.grads, adam, cfg);
    }
    return w;
}

}  // namespace

TransformerWeights train(const TransformerWeights& w, const std::vector<int>& corpus,
                         const TrainConfig& cfg, std::ostream* loss_csv) {
    return run_training(w, corpus, cfg, loss_csv);
}

TransformerWeights recover(const TransformerWeights& w_pruned,
                           const std::vector<int>& corpus, const TrainConfig& cfg,
                           std::ostream* loss_csv) {
    return run_training(w_pruned, corpus, cfg, loss_csv);
}

}  // namespace amp
