// Command-line front end wiring training, scoring, pruning, recovery and
// evaluation into one binary. Every run logs its resolved configuration
// and seeds; all errors leave a single machine-parsable line on stderr:
//   error[kind]: message
// Exit codes: 0 ok, 1 internal, 2 usage/config, 3 io, 4 infeasible,
// 5 format/provenance.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "amp/error.hpp"
#include "amp/evaluator.hpp"
#include "amp/io.hpp"
#include "amp/kernels.hpp"
#include "amp/model.hpp"
#include "amp/pruner.hpp"
#include "amp/scorer.hpp"
#include "amp/trainer.hpp"

namespace {

using nlohmann::json;

// A report whose fingerprint does not match the model it is applied to.
struct ProvenanceError : amp::Error {
    using Error::Error;
};

amp::ModelConfig parse_model_config(const std::string& path) {
    json j;
    try {
        j = json::parse(amp::io::read_file(path));
    } catch (const json::exception& e) {
        throw amp::FormatError("bad model config JSON in " + path + ": " + e.what());
    }
    amp::ModelConfig c;
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "vocab_size") c.vocab_size = value.get<int>();
            else if (key == "d_model") c.d_model = value.get<int>();
            else if (key == "n_layers") c.n_layers = value.get<int>();
            else if (key == "n_heads") c.n_heads = value.get<int>();
            else if (key == "d_head") c.d_head = value.get<int>();
            else if (key == "d_intermediate") c.d_intermediate = value.get<int>();
            else if (key == "max_seq_len") c.max_seq_len = value.get<int>();
            else if (key == "rms_norm_eps") c.rms_norm_eps = static_cast<float>(value.get<double>());
            else if (key == "rope_theta") c.rope_theta = static_cast<float>(value.get<double>());
            else throw amp::ConfigError("unknown model config key '" + key + "' in " + path);
        } catch (const json::exception& e) {
            throw amp::FormatError("bad value for config key '" + key + "': " + e.what());
        }
    }
    c.validate();
    return c;
}

void log_backend() {
    const char* name = amp::kernels::active().name;  // may throw before printing
    std::cout << "kernels: " << name << "  threads: " << amp::kernels::thread_count()
              << "\n";
}

void log_config(const amp::ModelConfig& c) {
    std::cout << "model config: vocab_size=" << c.vocab_size << " d_model=" << c.d_model
              << " n_layers=" << c.n_layers << " n_heads=" << c.n_heads
              << " d_head=" << c.d_head << " d_intermediate=" << c.d_intermediate
              << " max_seq_len=" << c.max_seq_len << " rms_norm_eps=" << c.rms_norm_eps
              << " rope_theta=" << c.rope_theta << "\n";
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            seeds.push_back(std::stoull(item));
        } catch (const std::exception&) {
            throw amp::ConfigError("bad seed '" + item + "' in seed list");
        }
    }
    if (seeds.empty()) throw amp::ConfigError("empty seed list");
    return seeds;
}

struct TrainArgs {
    std::string config_path, corpus_path, out_path, loss_csv_path;
    int steps = 0;
    std::uint64_t seed = 0;
    double lr = 3e-4;
    int batch_tokens = 512;
    int eval_every = 50;
};

void run_train(const TrainArgs& a) {
    const amp::ModelConfig config = parse_model_config(a.config_path);
    const std::vector<int> corpus = amp::io::load_corpus(a.corpus_path);
    log_backend();
    log_config(config);
    std::cout << "train: steps=" << a.steps << " lr=" << a.lr
              << " batch_tokens=" << a.batch_tokens << " seed=" << a.seed
              << " corpus_tokens=" << corpus.size() << "\n";

    amp::TrainConfig tc;
    tc.steps = a.steps;
    tc.batch_tokens = a.batch_tokens;
    tc.learning_rate = static_cast<float>(a.lr);
    tc.seed = a.seed;
    tc.eval_every = a.eval_every;

    const amp::TransformerWeights init = amp::init_weights(config, a.seed);
    std::ofstream csv;
    std::ostream* csv_out = nullptr;
    if (!a.loss_csv_path.empty()) {
        csv.open(a.loss_csv_path, std::ios::trunc);
        if (!csv) throw amp::IoError("cannot open for writing: " + a.loss_csv_path);
        csv_out = &csv;
    }
    const amp::TransformerWeights trained = amp::train(init, corpus, tc, csv_out);
    amp::io::save_checkpoint(trained, a.out_path);
    std::cout << "saved " << a.out_path
              << "  fingerprint=" << amp::io::fingerprint_file(a.out_path) << "\n";
}

struct ScoreArgs {
    std::string model_path, calib_path, out_path;
    int samples = 50;
    int max_len = 512;
    std::uint64_t seed = 0;
};

// Calibration samples longer than the model context cannot be scored, so
// the CLI truncates to whichever of --max-len and max_seq_len is smaller.
int clamp_max_len(int requested, const amp::ModelConfig& config) {
    if (requested <= config.max_seq_len) return requested;
    std::cout << "note: clamping max-len " << requested << " to model max_seq_len "
              << config.max_seq_len << "\n";
    return config.max_seq_len;
}

void run_score(const ScoreArgs& a) {
    const amp::TransformerWeights w = amp::io::load_checkpoint(a.model_path);
    log_backend();
    log_config(w.config);
    const int max_len = clamp_max_len(a.max_len, w.config);
    std::cout << "score: samples=" << a.samples << " max_len=" << max_len
              << " seed=" << a.seed << "\n";
    const auto calib = amp::io::load_calibration(a.calib_path, a.samples, max_len, a.seed);
    const amp::ImportanceReport report = amp::compute_importance(w, calib);
    amp::io::write_file(a.out_path, amp::report_to_json(report));
    std::cout << "scored " << report.num_samples << " samples, " << report.total_tokens
              << " tokens; model fingerprint " << report.model_fingerprint << "\n"
              << "wrote " << a.out_path << "\n";
}

struct PruneArgs {
    std::string model_path, report_path, out_path, plan_path;
    std::string basis = "per-layer";
    std::string mode = "amp";
    double ratio = 0.0;
    std::optional<std::uint64_t> seed;
};

void run_prune(const PruneArgs& a) {
    const amp::TransformerWeights w = amp::io::load_checkpoint(a.model_path);
    const amp::ImportanceReport report =
        amp::report_from_json(amp::io::read_file(a.report_path));
    const std::string model_fp = amp::io::fingerprint_file(a.model_path);
    if (report.model_fingerprint != model_fp) {
        throw ProvenanceError("importance report was computed for model " +
                              report.model_fingerprint + ", but " + a.model_path +
                              " has fingerprint " + model_fp);
    }
    log_backend();
    log_config(w.config);
    std::cout << "prune: ratio=" << a.ratio << " basis=" << a.basis << " mode=" << a.mode;
    if (a.seed.has_value()) std::cout << " seed=" << *a.seed;
    std::cout << "\n";

    const amp::PruningPlan plan =
        amp::build_plan(w, report, a.ratio, amp::basis_from_string(a.basis),
                        amp::strategy_from_string(a.mode), a.seed);
    const amp::TransformerWeights pruned = amp::apply_plan(w, plan);
    amp::io::save_checkpoint(pruned, a.out_path);
    if (!a.plan_path.empty()) amp::io::write_file(a.plan_path, amp::plan_to_json(plan));

    const amp::RatioReport ratios = amp::achieved_ratio(w, pruned);
    std::cout << "parameters: " << amp::parameter_count(w) << " -> "
              << amp::parameter_count(pruned) << "\n"
              << "achieved ratio: " << ratios.overall
              << " (excluding embeddings/lm_head: " << ratios.excluding_embeddings << ")\n"
              << "saved " << a.out_path
              << "  fingerprint=" << amp::io::fingerprint_file(a.out_path) << "\n";
}

struct RecoverArgs {
    std::string model_path, corpus_path, out_path, loss_csv_path;
    int steps = 0;
    std::uint64_t seed = 0;
    double lr = 3e-4;
    int batch_tokens = 512;
    int eval_every = 50;
};

void run_recover(const RecoverArgs& a) {
    const amp::TransformerWeights w = amp::io::load_checkpoint(a.model_path);
    const std::vector<int> corpus = amp::io::load_corpus(a.corpus_path);
    log_backend();
    log_config(w.config);
    std::cout << "recover: steps=" << a.steps << " lr=" << a.lr
              << " batch_tokens=" << a.batch_tokens << " seed=" << a.seed
              << " corpus_tokens=" << corpus.size() << "\n";

    amp::TrainConfig tc;
    tc.steps = a.steps;
    tc.batch_tokens = a.batch_tokens;
    tc.learning_rate = static_cast<float>(a.lr);
    tc.seed = a.seed;
    tc.eval_every = a.eval_every;

    std::ofstream csv;
    std::ostream* csv_out = nullptr;
    if (!a.loss_csv_path.empty()) {
        csv.open(a.loss_csv_path, std::ios::trunc);
        if (!csv) throw amp::IoError("cannot open for writing: " + a.loss_csv_path);
        csv_out = &csv;
    }
    const amp::TransformerWeights recovered = amp::recover(w, corpus, tc, csv_out);
    amp::io::save_checkpoint(recovered, a.out_path);
    std::cout << "saved " << a.out_path
              << "  fingerprint=" << amp::io::fingerprint_file(a.out_path) << "\n";
}

int dispatch(int argc, char** argv) {
    CLI::App app{"activation-magnitude structured pruning toolkit"};
    app.require_subcommand(1);

    TrainArgs train_args;
    CLI::App* train = app.add_subcommand("train", "train a model from scratch");
    train->add_option("--config", train_args.config_path, "model config JSON")->required();
    train->add_option("--corpus", train_args.corpus_path, "training text file")->required();
    train->add_option("--steps", train_args.steps, "optimizer steps")->required();
    train->add_option("--seed", train_args.seed, "init/training seed");
    train->add_option("--out", train_args.out_path, "output checkpoint")->required();
    train->add_option("--lr", train_args.lr, "learning rate");
    train->add_option("--batch-tokens", train_args.batch_tokens, "tokens per step");
    train->add_option("--eval-every", train_args.eval_every, "loss log cadence");
    train->add_option("--loss-csv", train_args.loss_csv_path, "loss curve CSV path");

    ScoreArgs score_args;
    CLI::App* score = app.add_subcommand("score", "compute importance scores");
    score->add_option("--model", score_args.model_path, "checkpoint")->required();
    score->add_option("--calib", score_args.calib_path, "calibration text, one sample per line")->required();
    score->add_option("--samples", score_args.samples, "max calibration samples");
    score->add_option("--max-len", score_args.max_len, "max tokens per sample");
    score->add_option("--seed", score_args.seed, "subsampling seed");
    score->add_option("--out", score_args.out_path, "output report JSON")->required();

    PruneArgs prune_args;
    std::uint64_t prune_seed = 0;
    CLI::App* prune = app.add_subcommand("prune", "apply structural pruning");
    prune->add_option("--model", prune_args.model_path, "checkpoint")->required();
    prune->add_option("--report", prune_args.report_path, "importance report JSON")->required();
    prune->add_option("--ratio", prune_args.ratio, "pruning ratio in [0,1)")->required();
    prune->add_option("--basis", prune_args.basis, "per-layer | overall");
    prune->add_option("--mode", prune_args.mode, "amp | random | reversed");
    CLI::Option* seed_opt = prune->add_option("--seed", prune_seed, "seed (random mode)");
    prune->add_option("--out", prune_args.out_path, "output checkpoint")->required();
    prune->add_option("--plan", prune_args.plan_path, "output plan JSON");

    RecoverArgs recover_args;
    CLI::App* recover = app.add_subcommand("recover", "fine-tune a pruned model");
    recover->add_option("--model", recover_args.model_path, "pruned checkpoint")->required();
    recover->add_option("--corpus", recover_args.corpus_path, "training text file")->required();
    recover->add_option("--steps", recover_args.steps, "optimizer steps")->required();
    recover->add_option("--seed", recover_args.seed, "training seed");
    recover->add_option("--out", recover_args.out_path, "output checkpoint")->required();
    recover->add_option("--lr", recover_args.lr, "learning rate");
    recover->add_option("--batch-tokens", recover_args.batch_tokens, "tokens per step");
    recover->add_option("--eval-every", recover_args.eval_every, "loss log cadence");
    recover->add_option("--loss-csv", recover_args.loss_csv_path, "loss curve CSV path");

    std::string ppl_model, ppl_corpus, ppl_json;
    int ppl_chunk = 512;
    CLI::App* ppl = app.add_subcommand("ppl", "measure perplexity");
    ppl->add_option("--model", ppl_model, "checkpoint")->required();
    ppl->add_option("--corpus", ppl_corpus, "evaluation text file")->required();
    ppl->add_option("--chunk", ppl_chunk, "tokens per chunk");
    ppl->add_option("--json", ppl_json, "write result JSON here");

    std::string bench_model, bench_json;
    amp::LatencyProtocol bench_protocol;
    CLI::App* bench = app.add_subcommand("bench", "measure generation latency");
    bench->add_option("--model", bench_model, "checkpoint")->required();
    bench->add_option("--prompt-len", bench_protocol.prompt_len, "prompt tokens");
    bench->add_option("--gen-len", bench_protocol.gen_len, "generated tokens");
    bench->add_option("--runs", bench_protocol.runs, "timed runs");
    bench->add_option("--warmup", bench_protocol.warmup, "untimed warmup runs");
    bench->add_option("--json", bench_json, "write result JSON here");

    std::string co_model, co_calib, co_corpus, co_seeds = "1,2,3", co_json;
    double co_ratio = 0.25;
    int co_samples = 50, co_max_len = 512, co_chunk = 256;
    std::uint64_t co_calib_seed = 0;
    CLI::App* coherence = app.add_subcommand("coherence", "compare pruning strategies");
    coherence->add_option("--model", co_model, "checkpoint")->required();
    coherence->add_option("--calib", co_calib, "calibration text")->required();
    coherence->add_option("--corpus", co_corpus, "evaluation text")->required();
    coherence->add_option("--ratio", co_ratio, "per-layer pruning ratio");
    coherence->add_option("--seeds", co_seeds, "comma-separated random-strategy seeds");
    coherence->add_option("--samples", co_samples, "max calibration samples");
    coherence->add_option("--max-len", co_max_len, "max tokens per sample");
    coherence->add_option("--calib-seed", co_calib_seed, "calibration subsampling seed");
    coherence->add_option("--chunk", co_chunk, "tokens per PPL chunk");
    coherence->add_option("--json", co_json, "write report JSON here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);  // --help / --version; prints and exits 0
    } catch (const CLI::ParseError& e) {
        std::cerr << "error[usage]: " << e.what() << "\n";
        return 2;
    }

    if (train->parsed()) run_train(train_args);
    if (score->parsed()) run_score(score_args);
    if (prune->parsed()) {
        if (seed_opt->count() > 0) prune_args.seed = prune_seed;
        run_prune(prune_args);
    }
    if (recover->parsed()) run_recover(recover_args);
    if (ppl->parsed()) {
        const amp::TransformerWeights w = amp::io::load_checkpoint(ppl_model);
        const std::vector<int> corpus = amp::io::load_corpus(ppl_corpus);
        log_backend();
        log_config(w.config);
        std::cout << "ppl: chunk=" << ppl_chunk << " corpus_tokens=" << corpus.size() << "\n";
        const amp::EvalResult r = amp::perplexity(w, corpus, ppl_chunk);
        std::cout.precision(10);
        std::cout << "perplexity: " << r.value << " over " << r.total_tokens
                  << " predicted tokens\n";
        if (!ppl_json.empty()) {
            json j{{"kind", "perplexity"},
                   {"value", r.value},
                   {"chunk_len", r.chunk_len},
                   {"total_tokens", r.total_tokens},
                   {"model_fingerprint", r.model_fingerprint}};
            amp::io::write_file(ppl_json, j.dump(2) + "\n");
        }
    }
    if (bench->parsed()) {
        const amp::TransformerWeights w = amp::io::load_checkpoint(bench_model);
        log_backend();
        log_config(w.config);
        std::cout << "bench: prompt_len=" << bench_protocol.prompt_len
                  << " gen_len=" << bench_protocol.gen_len << " runs=" << bench_protocol.runs
                  << " warmup=" << bench_protocol.warmup << "\n";
        const amp::EvalResult r = amp::latency_bench(w, bench_protocol);
        std::cout.precision(6);
        std::cout << "mean latency: " << r.value << " s over " << r.protocol.runs << " runs\n";
        if (!bench_json.empty()) {
            json j{{"kind", "latency"},
                   {"value", r.value},
                   {"prompt_len", r.protocol.prompt_len},
                   {"gen_len", r.protocol.gen_len},
                   {"runs", r.protocol.runs},
                   {"warmup", r.protocol.warmup},
                   {"per_run", r.per_run},
                   {"model_fingerprint", r.model_fingerprint}};
            amp::io::write_file(bench_json, j.dump(2) + "\n");
        }
    }
    if (coherence->parsed()) {
        const amp::TransformerWeights w = amp::io::load_checkpoint(co_model);
        const std::vector<int> corpus = amp::io::load_corpus(co_corpus);
        log_backend();
        log_config(w.config);
        const int max_len = clamp_max_len(co_max_len, w.config);
        std::cout << "coherence: ratio=" << co_ratio << " seeds=" << co_seeds
                  << " samples=" << co_samples << " max_len=" << max_len
                  << " calib_seed=" << co_calib_seed << " chunk=" << co_chunk << "\n";
        const auto calib = amp::io::load_calibration(co_calib, co_samples, max_len, co_calib_seed);
        const amp::CoherenceReport r =
            amp::coherence_check(w, calib, corpus, co_ratio, parse_seed_list(co_seeds), co_chunk);
        std::cout << amp::coherence_table(r);
        if (!co_json.empty()) amp::io::write_file(co_json, amp::coherence_to_json(r));
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const ProvenanceError& e) {
        std::cerr << "error[provenance]: " << e.what() << "\n";
        return 5;
    } catch (const amp::FormatError& e) {
        std::cerr << "error[format]: " << e.what() << "\n";
        return 5;
    } catch (const amp::InfeasibleError& e) {
        std::cerr << "error[infeasible]: " << e.what() << "\n";
        return 4;
    } catch (const amp::IoError& e) {
        std::cerr << "error[io]: " << e.what() << "\n";
        return 3;
    } catch (const amp::ConfigError& e) {
        std::cerr << "error[config]: " << e.what() << "\n";
        return 2;
    } catch (const amp::Error& e) {
        std::cerr << "error[internal]: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error[internal]: " << e.what() << "\n";
        return 1;
    }
}
