#pragma once

// Turns an importance report into a structural pruning plan and applies
// it by exact weight-matrix surgery: removed heads drop their column
// blocks from Wq/Wk/Wv and row block from Wo; removed up/gate pairs drop
// their columns from Wgate/Wup and row from Wdown. Pure slicing — the
// remaining compute stays dense.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "amp/model.hpp"
#include "amp/scorer.hpp"

namespace amp {

enum class PruneStrategy { Amp, Random, Reversed };
enum class RatioBasis { PerLayer, Overall };

const char* to_string(PruneStrategy s);
const char* to_string(RatioBasis b);
PruneStrategy strategy_from_string(const std::string& s);
RatioBasis basis_from_string(const std::string& s);

struct LayerPrunePlan {
    std::vector<int> heads;  // removed head indices, sorted ascending
    std::vector<int> mlp;    // removed up/gate pair indices, sorted ascending
};

struct PruningPlan {
    PruneStrategy strategy = PruneStrategy::Amp;
    RatioBasis ratio_basis = RatioBasis::PerLayer;
    double requested_ratio = 0.0;
    std::optional<std::uint64_t> seed;  // random strategy only
    std::string model_fingerprint;
    std::vector<LayerPrunePlan> per_layer;
    double achieved_overall_ratio = 0.0;  // 1 - Q/P over all parameters
};

// round-half-up(n_items * fraction), clamped to [0, n_items-1] so at
// least one item always survives. Throws ConfigError for fraction
// outside [0, 1).
int per_layer_count(int n_items, double fraction);

// Builds a plan from per-layer scores. amp removes the lowest-scoring
// items, reversed the highest, random a seeded uniform sample; ties are
// broken toward the lower index. With basis=Overall the per-layer
// fraction is solved so the removed share of total parameters matches
// `ratio`; an unachievable ratio raises InfeasibleError naming the
// maximum achievable value.
PruningPlan build_plan(const TransformerWeights& w, const ImportanceReport& report,
                       double ratio, RatioBasis basis, PruneStrategy strategy,
                       std::optional<std::uint64_t> seed = std::nullopt);

// Applies the surgery, returning a new model; the input is untouched.
// A plan that removes nothing returns a bit-identical copy.
TransformerWeights apply_plan(const TransformerWeights& w, const PruningPlan& plan);

struct RatioReport {
    double overall = 0.0;               // 1 - Q/P, embeddings and lm_head included
    double excluding_embeddings = 0.0;  // same, with embedding/lm_head excluded
};

RatioReport achieved_ratio(const TransformerWeights& original,
                           const TransformerWeights& pruned);

std::string plan_to_json(const PruningPlan& plan);
PruningPlan plan_from_json(const std::string& text);

}  // namespace amp
