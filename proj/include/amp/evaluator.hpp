#pragma once

// Perplexity over non-overlapping corpus chunks, wall-clock generation
// latency under a fixed prompt/generation protocol, and the coherence
// harness that compares pruning strategies (amp vs random vs reversed)
// on one importance report.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "amp/model.hpp"

namespace amp {

struct LatencyProtocol {
    int prompt_len = 12;
    int gen_len = 128;
    int runs = 20;
    int warmup = 10;
};

struct EvalResult {
    enum class Kind { Perplexity, Latency };
    Kind kind = Kind::Perplexity;
    double value = 0.0;  // PPL, or mean seconds per generation
    int chunk_len = 0;                // perplexity protocol
    long long total_tokens = 0;       // perplexity: predicted token count
    LatencyProtocol protocol;         // latency protocol
    std::vector<double> per_run;      // latency: raw seconds, length runs
    std::string model_fingerprint;
};

// Non-overlapping chunks of chunk_len tokens; PPL = exp(mean per-token
// next-token NLL). The trailing partial chunk is dropped. Matches
// exp(loss) from the trainer on the same chunks.
EvalResult perplexity(const TransformerWeights& w, const std::vector<int>& corpus,
                      int chunk_len);

// Deterministic benchmark prompt: BOS followed by fixed text bytes.
std::vector<int> bench_prompt(int prompt_len);

// warmup untimed generations, then `runs` timed greedy generations with
// the KV cache; value is the mean of per_run seconds.
EvalResult latency_bench(const TransformerWeights& w, const LatencyProtocol& protocol);

// Paired benchmark for fair comparisons: both models warm up, then timed
// runs alternate a/b within one session so clock drift hits both equally.
std::pair<EvalResult, EvalResult> latency_bench_pair(const TransformerWeights& a,
                                                     const TransformerWeights& b,
                                                     const LatencyProtocol& protocol);

// dense mean latency / pruned mean latency. Both inputs must be latency
// results.
double speedup(const EvalResult& dense, const EvalResult& pruned);

struct CoherenceReport {
    double ratio = 0.0;
    double dense_ppl = 0.0;
    double amp_ppl = 0.0;
    std::vector<std::pair<std::uint64_t, double>> random_ppls;  // (seed, ppl)
    double median_random_ppl = 0.0;
    double reversed_ppl = 0.0;
    bool pass = false;  // amp < median(random) < reversed
    std::string model_fingerprint;
};

// Scores once, prunes per strategy at the given per-layer ratio with no
// recovery, and measures PPL of every variant. Refuses to run on a model
// whose dense PPL is not better than the uniform baseline (vocab_size).
CoherenceReport coherence_check(const TransformerWeights& w,
                                const std::vector<std::vector<int>>& calib,
                                const std::vector<int>& corpus, double ratio,
                                const std::vector<std::uint64_t>& seeds,
                                int chunk_len = 256);

std::string coherence_table(const CoherenceReport& r);
std::string coherence_to_json(const CoherenceReport& r);

}  // namespace amp
