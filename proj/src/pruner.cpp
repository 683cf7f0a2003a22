#include "amp/pruner.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <random>

#include "json.hpp"

#include "amp/error.hpp"
#include "amp/io.hpp"

namespace amp {

using nlohmann::json;

namespace {

// Parameters removed per pruned unit: a head owns a d_model×d_head column
// block in each of Wq/Wk/Wv plus a d_head×d_model row block in Wo; an
// up/gate pair owns one column of Wgate and Wup plus one row of Wdown.
long long head_unit_params(const ModelConfig& cfg) {
    return 4LL * cfg.d_model * cfg.d_head;
}

long long pair_unit_params(const ModelConfig& cfg) { return 3LL * cfg.d_model; }

void check_report_matches(const TransformerWeights& w, const ImportanceReport& report) {
    if (report.per_layer.size() != w.layers.size()) {
        throw ConfigError("importance report has " + std::to_string(report.per_layer.size()) +
                          " layers, model has " + std::to_string(w.layers.size()));
    }
    for (std::size_t l = 0; l < w.layers.size(); ++l) {
        const LayerScores& ls = report.per_layer[l];
        if (static_cast<int>(ls.head_scores.size()) != w.layers[l].n_heads ||
            static_cast<int>(ls.mlp_scores.size()) != w.layers[l].d_intermediate) {
            throw ConfigError("importance report layer " + std::to_string(l) +
                              " dimensions do not match the model");
        }
    }
}

// Indices of the `count` lowest (or highest) scores; ties resolved toward
// the lower index. Result sorted ascending.
std::vector<int> pick_by_score(const std::vector<double>& scores, int count, bool lowest) {
    std::vector<int> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const double sa = scores[static_cast<std::size_t>(a)];
        const double sb = scores[static_cast<std::size_t>(b)];
        if (sa != sb) return lowest ? sa < sb : sa > sb;
        return a < b;
    });
    order.resize(static_cast<std::size_t>(count));
    std::sort(order.begin(), order.end());
    return order;
}

std::vector<int> pick_random(int n_items, int count, std::mt19937_64& rng) {
    std::vector<int> idx(static_cast<std::size_t>(n_items));
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < count; ++i) {
        const int j = i + static_cast<int>(rng() % static_cast<std::uint64_t>(n_items - i));
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    idx.resize(static_cast<std::size_t>(count));
    std::sort(idx.begin(), idx.end());
    return idx;
}

// Complement of `removed` (sorted) in [0, n).
std::vector<int> kept_indices(const std::vector<int>& removed, int n) {
    std::vector<int> keep;
    keep.reserve(static_cast<std::size_t>(n) - removed.size());
    std::size_t r = 0;
    for (int i = 0; i < n; ++i) {
        if (r < removed.size() && removed[r] == i) {
            ++r;
        } else {
            keep.push_back(i);
        }
    }
    return keep;
}

// New matrix keeping the listed column blocks of width `block`.
Tensor keep_col_blocks(const Tensor& m, const std::vector<int>& keep, int block) {
    const int rows = m.rows();
    const int out_cols = static_cast<int>(keep.size()) * block;
    Tensor out({rows, out_cols});
    for (int i = 0; i < rows; ++i) {
        const float* src = m.row(i);
        float* dst = out.row(i);
        for (std::size_t kb = 0; kb < keep.size(); ++kb) {
            std::memcpy(dst + kb * static_cast<std::size_t>(block),
                        src + static_cast<std::size_t>(keep[kb]) * block,
                        static_cast<std::size_t>(block) * sizeof(float));
        }
    }
    return out;
}

// New matrix keeping the listed row blocks of height `block`.
Tensor keep_row_blocks(const Tensor& m, const std::vector<int>& keep, int block) {
    const int cols = m.cols();
    const int out_rows = static_cast<int>(keep.size()) * block;
    Tensor out({out_rows, cols});
    for (std::size_t kb = 0; kb < keep.size(); ++kb) {
        std::memcpy(out.row(static_cast<int>(kb) * block),
                    m.row(keep[kb] * block),
                    static_cast<std::size_t>(block) * cols * sizeof(float));
    }
    return out;
}

void check_removed_list(const std::vector<int>& removed, int n_items,
                        const std::string& what) {
    if (static_cast<int>(removed.size()) >= n_items) {
        throw ConfigError(what + ": removing " + std::to_string(removed.size()) +
                          " of " + std::to_string(n_items) + " leaves nothing");
    }
    for (std::size_t i = 0; i < removed.size(); ++i) {
        if (removed[i] < 0 || removed[i] >= n_items) {
            throw ConfigError(what + ": index " + std::to_string(removed[i]) + " out of range");
        }
        if (i > 0 && removed[i] <= removed[i - 1]) {
            throw ConfigError(what + ": indices must be strictly ascending");
        }
    }
}

}  // namespace

const char* to_string(PruneStrategy s) {
    switch (s) {
        case PruneStrategy::Amp: return "amp";
        case PruneStrategy::Random: return "random";
        case PruneStrategy::Reversed: return "reversed";
    }
    return "?";
}

const char* to_string(RatioBasis b) {
    return b == RatioBasis::PerLayer ? "per_layer" : "overall";
}

PruneStrategy strategy_from_string(const std::string& s) {
    if (s == "amp") return PruneStrategy::Amp;
    if (s == "random") return PruneStrategy::Random;
    if (s == "reversed") return PruneStrategy::Reversed;
    throw ConfigError("unknown pruning strategy: " + s);
}

RatioBasis basis_from_string(const std::string& s) {
    if (s == "per_layer" || s == "per-layer") return RatioBasis::PerLayer;
    if (s == "overall") return RatioBasis::Overall;
    throw ConfigError("unknown ratio basis: " + s);
}

int per_layer_count(int n_items, double fraction) {
    if (n_items < 1) throw ConfigError("per_layer_count: n_items must be >= 1");
    if (!(fraction >= 0.0) || fraction >= 1.0) {
        throw ConfigError("pruning fraction must be in [0,1), got " + std::to_string(fraction));
    }
    int count = static_cast<int>(std::floor(n_items * fraction + 0.5));
    if (count < 0) count = 0;
    if (count > n_items - 1) count = n_items - 1;
    return count;
}

PruningPlan build_plan(const TransformerWeights& w, const ImportanceReport& report,
                       double ratio, RatioBasis basis, PruneStrategy strategy,
                       std::optional<std::uint64_t> seed) {
    validate_weights(w);
    check_report_matches(w, report);
    if (!(ratio >= 0.0) || ratio >= 1.0) {
        throw ConfigError("pruning ratio must be in [0,1), got " + std::to_string(ratio));
    }
    if (strategy == PruneStrategy::Random && !seed.has_value()) {
        throw ConfigError("random strategy requires a seed");
    }

    const ModelConfig& cfg = w.config;
    double fraction = ratio;
    if (basis == RatioBasis::Overall) {
        const double p_total = static_cast<double>(parameter_count(w));
        const double p_prunable = static_cast<double>(prunable_parameter_count(w));
        long long max_removable = 0;
        for (const LayerWeights& lw : w.layers) {
            max_removable += (lw.n_heads - 1) * head_unit_params(cfg);
            max_removable += (lw.d_intermediate - 1) * pair_unit_params(cfg);
        }
        const double max_achievable = max_removable / p_total;
        if (ratio > max_achievable) {
            throw InfeasibleError("overall ratio " + std::to_string(ratio) +
                                  " is unachievable; maximum is " +
                                  std::to_string(max_achievable) +
                                  " (every layer must keep one head and one MLP pair)");
        }
        fraction = ratio * p_total / p_prunable;
        if (fraction >= 1.0) fraction = std::nextafter(1.0, 0.0);
    }

    PruningPlan plan;
    plan.strategy = strategy;
    plan.ratio_basis = basis;
    plan.requested_ratio = ratio;
    plan.seed = strategy == PruneStrategy::Random ? seed : std::nullopt;
    plan.model_fingerprint =
        report.model_fingerprint.empty() ? io::fingerprint(w) : report.model_fingerprint;

    std::mt19937_64 rng(seed.value_or(0));
    long long removed_params = 0;
    for (std::size_t l = 0; l < w.layers.size(); ++l) {
        const LayerWeights& lw = w.layers[l];
        const int n_h = per_layer_count(lw.n_heads, fraction);
        const int n_m = per_layer_count(lw.d_intermediate, fraction);
        LayerPrunePlan lp;
        switch (strategy) {
            case PruneStrategy::Amp:
                lp.heads = pick_by_score(report.per_layer[l].head_scores, n_h, true);
                lp.mlp = pick_by_score(report.per_layer[l].mlp_scores, n_m, true);
                break;
            case PruneStrategy::Reversed:
                lp.heads = pick_by_score(report.per_layer[l].head_scores, n_h, false);
                lp.mlp = pick_by_score(report.per_layer[l].mlp_scores, n_m, false);
                break;
            case PruneStrategy::Random:
                lp.heads = pick_random(lw.n_heads, n_h, rng);
                lp.mlp = pick_random(lw.d_intermediate, n_m, rng);
                break;
        }
        removed_params += static_cast<long long>(lp.heads.size()) * head_unit_params(cfg);
        removed_params += static_cast<long long>(lp.mlp.size()) * pair_unit_params(cfg);
        plan.per_layer.push_back(std::move(lp));
    }
    plan.achieved_overall_ratio =
        static_cast<double>(removed_params) / static_cast<double>(parameter_count(w));
    return plan;
}

TransformerWeights apply_plan(const TransformerWeights& w, const PruningPlan& plan) {
    validate_weights(w);
    if (plan.per_layer.size() != w.layers.size()) {
        throw ConfigError("plan has " + std::to_string(plan.per_layer.size()) +
                          " layers, model has " + std::to_string(w.layers.size()));
    }
    TransformerWeights out;
    out.config = w.config;
    out.token_embedding = w.token_embedding;
    out.final_norm = w.final_norm;
    out.lm_head = w.lm_head;
    out.layers.reserve(w.layers.size());
    for (std::size_t l = 0; l < w.layers.size(); ++l) {
        const LayerWeights& lw = w.layers[l];
        const LayerPrunePlan& lp = plan.per_layer[l];
        const std::string where = "layers." + std::to_string(l);
        check_removed_list(lp.heads, lw.n_heads, where + " heads");
        check_removed_list(lp.mlp, lw.d_intermediate, where + " mlp");

        const std::vector<int> keep_h = kept_indices(lp.heads, lw.n_heads);
        const std::vector<int> keep_m = kept_indices(lp.mlp, lw.d_intermediate);

        LayerWeights nl;
        nl.attn_norm = lw.attn_norm;
        nl.mlp_norm = lw.mlp_norm;
        nl.wq = keep_col_blocks(lw.wq, keep_h, w.config.d_head);
        nl.wk = keep_col_blocks(lw.wk, keep_h, w.config.d_head);
        nl.wv = keep_col_blocks(lw.wv, keep_h, w.config.d_head);
        nl.wo = keep_row_blocks(lw.wo, keep_h, w.config.d_head);
        nl.w_gate = keep_col_blocks(lw.w_gate, keep_m, 1);
        nl.w_up = keep_col_blocks(lw.w_up, keep_m, 1);
        nl.w_down = keep_row_blocks(lw.w_down, keep_m, 1);
        nl.n_heads = static_cast<int>(keep_h.size());
        nl.d_intermediate = static_cast<int>(keep_m.size());
        out.layers.push_back(std::move(nl));
    }
    validate_weights(out);
    return out;
}

RatioReport achieved_ratio(const TransformerWeights& original,
                           const TransformerWeights& pruned) {
    const double p = static_cast<double>(parameter_count(original));
    const double q = static_cast<double>(parameter_count(pruned));
    RatioReport r;
    r.overall = 1.0 - q / p;
    const double embed_orig = static_cast<double>(original.token_embedding.size() +
                                                  original.lm_head.size());
    const double embed_pruned = static_cast<double>(pruned.token_embedding.size() +
                                                    pruned.lm_head.size());
    r.excluding_embeddings = 1.0 - (q - embed_pruned) / (p - embed_orig);
    return r;
}

std::string plan_to_json(const PruningPlan& plan) {
    json layers = json::array();
    for (const LayerPrunePlan& lp : plan.per_layer) {
        layers.push_back(json{{"heads", lp.heads}, {"mlp", lp.mlp}});
    }
    json j{{"version", 1},
           {"strategy", to_string(plan.strategy)},
           {"ratio_basis", to_string(plan.ratio_basis)},
           {"requested_ratio", plan.requested_ratio},
           {"model_fingerprint", plan.model_fingerprint},
           {"achieved_overall_ratio", plan.achieved_overall_ratio},
           {"layers", layers}};
    j["seed"] = plan.seed.has_value() ? json(*plan.seed) : json(nullptr);
    return j.dump(2) + "\n";
}

PruningPlan plan_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw FormatError(std::string("bad pruning plan JSON: ") + e.what());
    }
    PruningPlan plan;
    try {
        if (j.at("version").get<int>() != 1) throw FormatError("unsupported plan version");
        plan.strategy = strategy_from_string(j.at("strategy").get<std::string>());
        plan.ratio_basis = basis_from_string(j.at("ratio_basis").get<std::string>());
        plan.requested_ratio = j.at("requested_ratio").get<double>();
        plan.model_fingerprint = j.at("model_fingerprint").get<std::string>();
        plan.achieved_overall_ratio = j.at("achieved_overall_ratio").get<double>();
        if (j.contains("seed") && !j["seed"].is_null()) {
            plan.seed = j["seed"].get<std::uint64_t>();
        }
        for (const json& layer : j.at("layers")) {
            LayerPrunePlan lp;
            lp.heads = layer.at("heads").get<std::vector<int>>();
            lp.mlp = layer.at("mlp").get<std::vector<int>>();
            plan.per_layer.push_back(std::move(lp));
        }
    } catch (const json::exception& e) {
        throw FormatError(std::string("bad pruning plan fields: ") + e.what());
    }
    return plan;
}

}  // namespace amp
