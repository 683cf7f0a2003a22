#include "amp/evaluator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "json.hpp"

#include "amp/error.hpp"
#include "amp/io.hpp"
#include "amp/pruner.hpp"
#include "amp/scorer.hpp"

namespace amp {

namespace {

// Mean next-token NLL of one token window, from full-sequence logits.
// Same shift-and-log-sum-exp arithmetic as the training loss, so
// exp(training loss) and PPL agree on identical windows.
double window_nll(const Tensor& logits, const std::vector<int>& tokens) {
    const int s = static_cast<int>(tokens.size());
    const int vocab = logits.cols();
    double total = 0.0;
    for (int i = 0; i + 1 < s; ++i) {
        const float* row = logits.row(i);
        float mx = row[0];
        for (int j = 1; j < vocab; ++j) {
            if (row[j] > mx) mx = row[j];
        }
        double sum = 0.0;
        for (int j = 0; j < vocab; ++j) {
            sum += std::exp(static_cast<double>(row[j]) - mx);
        }
        const int target = tokens[static_cast<std::size_t>(i) + 1];
        total += std::log(sum) - (static_cast<double>(row[target]) - mx);
    }
    return total;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double timed_generate(const TransformerWeights& w, const std::vector<int>& prompt,
                      int gen_len) {
    const auto t0 = std::chrono::steady_clock::now();
    generate(w, prompt, gen_len);
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

EvalResult perplexity(const TransformerWeights& w, const std::vector<int>& corpus,
                      int chunk_len) {
    validate_weights(w);
    if (chunk_len < 2) throw ConfigError("chunk_len must be >= 2");
    if (chunk_len > w.config.max_seq_len) {
        throw ConfigError("chunk_len " + std::to_string(chunk_len) +
                          " exceeds max_seq_len " + std::to_string(w.config.max_seq_len));
    }
    if (corpus.size() < static_cast<std::size_t>(chunk_len) + 1) {
        throw ConfigError("corpus too short: " + std::to_string(corpus.size()) +
                          " tokens, need at least " + std::to_string(chunk_len + 1));
    }
    const std::size_t n_chunks = corpus.size() / static_cast<std::size_t>(chunk_len);
    double total_nll = 0.0;
    long long total_pred = 0;
    for (std::size_t c = 0; c < n_chunks; ++c) {
        const auto begin = corpus.begin() + static_cast<std::ptrdiff_t>(c * chunk_len);
        const std::vector<int> chunk(begin, begin + chunk_len);
        total_nll += window_nll(forward(w, chunk), chunk);
        total_pred += chunk_len - 1;
    }
    EvalResult r;
    r.kind = EvalResult::Kind::Perplexity;
    r.value = std::exp(total_nll / static_cast<double>(total_pred));
    r.chunk_len = chunk_len;
    r.total_tokens = total_pred;
    r.model_fingerprint = io::fingerprint(w);
    return r;
}

std::vector<int> bench_prompt(int prompt_len) {
    if (prompt_len < 1) throw ConfigError("prompt_len must be >= 1");
    static const std::string seed_text =
        "The quick brown fox jumps over the lazy dog. ";
    std::vector<int> prompt{io::kBosToken};
    while (static_cast<int>(prompt.size()) < prompt_len) {
        for (char ch : seed_text) {
            prompt.push_back(static_cast<int>(static_cast<unsigned char>(ch)));
            if (static_cast<int>(prompt.size()) == prompt_len) break;
        }
    }
    return prompt;
}

EvalResult latency_bench(const TransformerWeights& w, const LatencyProtocol& protocol) {
    validate_weights(w);
    if (protocol.runs < 1) throw ConfigError("runs must be >= 1");
    if (protocol.warmup < 0) throw ConfigError("warmup must be >= 0");
    if (protocol.gen_len < 1) throw ConfigError("gen_len must be >= 1");
    if (protocol.prompt_len + protocol.gen_len > w.config.max_seq_len) {
        throw ConfigError("context overflow: prompt_len + gen_len exceeds max_seq_len");
    }
    const std::vector<int> prompt = bench_prompt(protocol.prompt_len);
    for (int i = 0; i < protocol.warmup; ++i) generate(w, prompt, protocol.gen_len);

    EvalResult r;
    r.kind = EvalResult::Kind::Latency;
    r.protocol = protocol;
    r.per_run.reserve(static_cast<std::size_t>(protocol.runs));
    double total = 0.0;
    for (int i = 0; i < protocol.runs; ++i) {
        const double sec = timed_generate(w, prompt, protocol.gen_len);
        r.per_run.push_back(sec);
        total += sec;
    }
    r.value = total / protocol.runs;
    r.model_fingerprint = io::fingerprint(w);
    return r;
}

std::pair<EvalResult, EvalResult> latency_bench_pair(const TransformerWeights& a,
                                                     const TransformerWeights& b,
                                                     const LatencyProtocol& protocol) {
    validate_weights(a);
    validate_weights(b);
    if (protocol.runs < 1) throw ConfigError("runs must be >= 1");
    const int max_seq = std::min(a.config.max_seq_len, b.config.max_seq_len);
    if (protocol.prompt_len + protocol.gen_len > max_seq) {
        throw ConfigError("context overflow: prompt_len + gen_len exceeds max_seq_len");
    }
    const std::vector<int> prompt = bench_prompt(protocol.prompt_len);
    for (int i = 0; i < protocol.warmup; ++i) {
        generate(a, prompt, protocol.gen_len);
        generate(b, prompt, protocol.gen_len);
    }
    EvalResult ra, rb;
    ra.kind = rb.kind = EvalResult::Kind::Latency;
    ra.protocol = rb.protocol = protocol;
    double ta = 0.0, tb = 0.0;
    for (int i = 0; i < protocol.runs; ++i) {
        const double sa = timed_generate(a, prompt, protocol.gen_len);
        const double sb = timed_generate(b, prompt, protocol.gen_len);
        ra.per_run.push_back(sa);
        rb.per_run.push_back(sb);
        ta += sa;
        tb += sb;
    }
    ra.value = ta / protocol.runs;
    rb.value = tb / protocol.runs;
    ra.model_fingerprint = io::fingerprint(a);
    rb.model_fingerprint = io::fingerprint(b);
    return {ra, rb};
}

double speedup(const EvalResult& dense, const EvalResult& pruned) {
    if (dense.kind != EvalResult::Kind::Latency ||
        pruned.kind != EvalResult::Kind::Latency) {
        throw ConfigError("speedup requires two latency results");
    }
    return dense.value / pruned.value;
}

CoherenceReport coherence_check(const TransformerWeights& w,
                                const std::vector<std::vector<int>>& calib,
                                const std::vector<int>& corpus, double ratio,
                                const std::vector<std::uint64_t>& seeds,
                                int chunk_len) {
    validate_weights(w);
    if (seeds.empty()) throw ConfigError("coherence_check needs at least one random seed");

    CoherenceReport r;
    r.ratio = ratio;
    r.dense_ppl = perplexity(w, corpus, chunk_len).value;
    r.model_fingerprint = io::fingerprint(w);
    if (r.dense_ppl >= static_cast<double>(w.config.vocab_size)) {
        throw ConfigError("refusing coherence check: dense perplexity " +
                          std::to_string(r.dense_ppl) +
                          " is not better than the uniform baseline " +
                          std::to_string(w.config.vocab_size));
    }

    const ImportanceReport report = compute_importance(w, calib);
    const PruningPlan amp_plan =
        build_plan(w, report, ratio, RatioBasis::PerLayer, PruneStrategy::Amp);
    const PruningPlan rev_plan =
        build_plan(w, report, ratio, RatioBasis::PerLayer, PruneStrategy::Reversed);
    r.amp_ppl = perplexity(apply_plan(w, amp_plan), corpus, chunk_len).value;
    r.reversed_ppl = perplexity(apply_plan(w, rev_plan), corpus, chunk_len).value;

    std::vector<double> randoms;
    for (std::uint64_t seed : seeds) {
        const PruningPlan plan =
            build_plan(w, report, ratio, RatioBasis::PerLayer, PruneStrategy::Random, seed);
        const double ppl = perplexity(apply_plan(w, plan), corpus, chunk_len).value;
        r.random_ppls.emplace_back(seed, ppl);
        randoms.push_back(ppl);
    }
    r.median_random_ppl = median(randoms);
    r.pass = r.amp_ppl < r.median_random_ppl && r.median_random_ppl < r.reversed_ppl;
    return r;
}

std::string coherence_table(const CoherenceReport& r) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(4);
    os << "strategy         ppl\n";
    os << "dense            " << r.dense_ppl << "\n";
    os << "amp              " << r.amp_ppl << "\n";
    for (const auto& [seed, ppl] : r.random_ppls) {
        os << "random[" << seed << "]" << std::string(seed < 10 ? 8 : 7, ' ') << ppl << "\n";
    }
    os << "median(random)   " << r.median_random_ppl << "\n";
    os << "reversed         " << r.reversed_ppl << "\n";
    os << "verdict: " << (r.pass ? "pass" : "fail")
       << " (amp < median(random) < reversed "
       << (r.pass ? "holds" : "does not hold") << ")\n";
    return os.str();
}

std::string coherence_to_json(const CoherenceReport& r) {
    nlohmann::json randoms = nlohmann::json::array();
    for (const auto& [seed, ppl] : r.random_ppls) {
        randoms.push_back({{"seed", seed}, {"ppl", ppl}});
    }
    nlohmann::json j{{"ratio", r.ratio},
                     {"dense_ppl", r.dense_ppl},
                     {"amp_ppl", r.amp_ppl},
                     {"random", randoms},
                     {"median_random_ppl", r.median_random_ppl},
                     {"reversed_ppl", r.reversed_ppl},
                     {"verdict", r.pass ? "pass" : "fail"},
                     {"model_fingerprint", r.model_fingerprint}};
    return j.dump(2) + "\n";
}

}  // namespace amp
