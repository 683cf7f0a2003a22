#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"

#include "amp/error.hpp"
#include "amp/io.hpp"
#include "amp/model.hpp"
#include "amp/scorer.hpp"
#include "amp/trainer.hpp"
#include "reference_model.hpp"

using amp::Tensor;

namespace {

amp::ModelConfig two_layer_config() {
    amp::ModelConfig c;
    c.vocab_size = 31;
    c.d_model = 32;
    c.n_layers = 2;
    c.n_heads = 4;
    c.d_head = 8;
    c.d_intermediate = 24;
    c.max_seq_len = 64;
    return c;
}

std::vector<std::vector<int>> random_calib(std::mt19937_64& rng, int samples, int vocab) {
    std::vector<std::vector<int>> calib;
    for (int s = 0; s < samples; ++s) {
        const int len = 4 + static_cast<int>(rng() % 12);
        std::vector<int> t(static_cast<std::size_t>(len));
        for (int& x : t) x = static_cast<int>(rng() % static_cast<std::uint64_t>(vocab));
        calib.push_back(std::move(t));
    }
    return calib;
}

}  // namespace

TEST_CASE("head score of a ones contribution is l1 over tokens") {
    Tensor ones({2, 3});
    for (float& x : ones.data) x = 1.0f;
    const std::vector<double> scores = amp::score_heads_layer({ones, Tensor({2, 3})});
    REQUIRE(scores.size() == 2);
    CHECK(scores[0] == 3.0);  // l1 = 6 over S = 2 tokens
    CHECK(scores[1] == 0.0);
}

TEST_CASE("head scores match a scalar absolute-sum oracle") {
    std::mt19937_64 rng(31);
    std::vector<Tensor> contribs;
    for (int n = 0; n < 3; ++n) {
        Tensor t({5, 7});
        for (float& x : t.data)
            x = static_cast<float>((rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0);
        contribs.push_back(std::move(t));
    }
    const std::vector<double> scores = amp::score_heads_layer(contribs);
    for (int n = 0; n < 3; ++n) {
        double sum = 0.0;
        for (float x : contribs[static_cast<std::size_t>(n)].data) sum += std::fabs(x);
        CHECK(scores[static_cast<std::size_t>(n)] ==
              doctest::Approx(sum / 5.0).epsilon(1e-5));
    }
}

TEST_CASE("head scorer rejects an empty contribution list") {
    CHECK_THROWS_AS(amp::score_heads_layer({}), amp::ConfigError);
}

TEST_CASE("mlp scores are token-averaged absolute activations") {
    // Single token: gate pre-activation [1, -1], up projection [2, 3].
    const Tensor down_input({1, 2}, {1.462117f, -0.806824f});
    const std::vector<double> scores = amp::score_mlp_layer(down_input);
    REQUIRE(scores.size() == 2);
    CHECK(scores[0] == doctest::Approx(1.462117).epsilon(1e-4));
    CHECK(scores[1] == doctest::Approx(0.806824).epsilon(1e-4));
}

TEST_CASE("duplicating every token leaves mlp scores unchanged") {
    std::mt19937_64 rng(32);
    Tensor one({3, 5});
    for (float& x : one.data) x = static_cast<float>((rng() >> 11) * 0x1.0p-53 - 0.5);
    Tensor two({6, 5});
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 5; ++c) {
            two.at(r, c) = one.at(r, c);
            two.at(r + 3, c) = one.at(r, c);
        }
    const auto s1 = amp::score_mlp_layer(one);
    const auto s2 = amp::score_mlp_layer(two);
    for (std::size_t i = 0; i < s1.size(); ++i)
        CHECK(s1[i] == doctest::Approx(s2[i]).epsilon(1e-12));
}

TEST_CASE("compute_importance of one sample equals that sample's scores") {
    const amp::TransformerWeights w = amp::init_weights(two_layer_config(), 41);
    const std::vector<int> sample = {1, 5, 9, 2, 2, 7};
    const amp::ImportanceReport report = amp::compute_importance(w, {sample});

    amp::ForwardCapture capture;
    amp::forward(w, sample, &capture);
    REQUIRE(report.per_layer.size() == 2);
    for (int l = 0; l < 2; ++l) {
        const auto heads = amp::score_heads_layer(capture.layers[l].head_contribs);
        const auto mlp = amp::score_mlp_layer(capture.layers[l].down_input);
        CHECK(report.per_layer[l].head_scores == heads);
        CHECK(report.per_layer[l].mlp_scores == mlp);
    }
    CHECK(report.num_samples == 1);
    CHECK(report.total_tokens == 6);
}

TEST_CASE("two identical samples score the same as one") {
    const amp::TransformerWeights w = amp::init_weights(two_layer_config(), 42);
    const std::vector<int> sample = {3, 1, 4, 1, 5, 9, 2, 6};
    const amp::ImportanceReport one = amp::compute_importance(w, {sample});
    const amp::ImportanceReport two = amp::compute_importance(w, {sample, sample});
    for (std::size_t l = 0; l < one.per_layer.size(); ++l) {
        CHECK(one.per_layer[l].head_scores == two.per_layer[l].head_scores);
        CHECK(one.per_layer[l].mlp_scores == two.per_layer[l].mlp_scores);
    }
    CHECK(two.total_tokens == 16);
}

TEST_CASE("compute_importance matches an external-averaging oracle") {
    const amp::TransformerWeights w = amp::init_weights(two_layer_config(), 43);
    std::mt19937_64 rng(33);
    const auto calib = random_calib(rng, 3, w.config.vocab_size);
    const amp::ImportanceReport report = amp::compute_importance(w, calib);

    // Oracle: score every sample separately against the f64 reference
    // model, then average externally.
    for (std::size_t l = 0; l < 2; ++l) {
        const int H = w.layers[l].n_heads;
        const int d_i = w.layers[l].d_intermediate;
        std::vector<double> head_avg(static_cast<std::size_t>(H), 0.0);
        std::vector<double> mlp_avg(static_cast<std::size_t>(d_i), 0.0);
        for (const auto& sample : calib) {
            const refmodel::RefTrace trace = refmodel::forward_trace(w, sample);
            const double S = static_cast<double>(sample.size());
            for (int n = 0; n < H; ++n) {
                double sum = 0.0;
                for (double x : trace.head_contribs[l][static_cast<std::size_t>(n)].d)
                    sum += std::fabs(x);
                head_avg[static_cast<std::size_t>(n)] += sum / S / calib.size();
            }
            const refmodel::DMat& act = trace.down_inputs[l];
            for (int m = 0; m < d_i; ++m) {
                double sum = 0.0;
                for (int s = 0; s < act.rows; ++s) sum += std::fabs(act.at(s, m));
                mlp_avg[static_cast<std::size_t>(m)] += sum / S / calib.size();
            }
        }
        for (int n = 0; n < H; ++n)
            CHECK(std::fabs(report.per_layer[l].head_scores[static_cast<std::size_t>(n)] -
                            head_avg[static_cast<std::size_t>(n)]) <= 1e-5);
        for (int m = 0; m < d_i; ++m)
            CHECK(std::fabs(report.per_layer[l].mlp_scores[static_cast<std::size_t>(m)] -
                            mlp_avg[static_cast<std::size_t>(m)]) <= 1e-5);
    }
}

TEST_CASE("scores are permutation-equivariant in head order") {
    const amp::TransformerWeights w = amp::init_weights(two_layer_config(), 44);
    std::mt19937_64 rng(34);
    const auto calib = random_calib(rng, 2, w.config.vocab_size);
    const amp::ImportanceReport before = amp::compute_importance(w, calib);

    // Swap heads 1 and 3 of layer 0: Wq/Wk/Wv column blocks, Wo row block.
    amp::TransformerWeights p = w;
    const int dh = w.config.d_head;
    for (int r = 0; r < w.config.d_model; ++r)
        for (int c = 0; c < dh; ++c) {
            std::swap(p.layers[0].wq.at(r, 1 * dh + c), p.layers[0].wq.at(r, 3 * dh + c));
            std::swap(p.layers[0].wk.at(r, 1 * dh + c), p.layers[0].wk.at(r, 3 * dh + c));
            std::swap(p.layers[0].wv.at(r, 1 * dh + c), p.layers[0].wv.at(r, 3 * dh + c));
        }
    for (int r = 0; r < dh; ++r)
        for (int c = 0; c < w.config.d_model; ++c)
            std::swap(p.layers[0].wo.at(1 * dh + r, c), p.layers[0].wo.at(3 * dh + r, c));

    const amp::ImportanceReport after = amp::compute_importance(p, calib);
    // Layer 0 sees identical inputs, so its scores permute bitwise.
    CHECK(after.per_layer[0].head_scores[1] == before.per_layer[0].head_scores[3]);
    CHECK(after.per_layer[0].head_scores[3] == before.per_layer[0].head_scores[1]);
    CHECK(after.per_layer[0].head_scores[0] == before.per_layer[0].head_scores[0]);
    CHECK(after.per_layer[0].head_scores[2] == before.per_layer[0].head_scores[2]);
    // Layer 1's input is the same value up to f32 summation order, since
    // the head contributions now add in a different order.
    for (std::size_t n = 0; n < 4; ++n)
        CHECK(after.per_layer[1].head_scores[n] ==
              doctest::Approx(before.per_layer[1].head_scores[n]).epsilon(1e-5));
}

TEST_CASE("scaling a head's Wo block scales exactly that head's score") {
    const amp::TransformerWeights w = amp::init_weights(two_layer_config(), 45);
    std::mt19937_64 rng(35);
    const auto calib = random_calib(rng, 2, w.config.vocab_size);
    const amp::ImportanceReport before = amp::compute_importance(w, calib);

    amp::TransformerWeights p = w;
    const int dh = w.config.d_head;
    for (int r = 0; r < dh; ++r)
        for (int c = 0; c < w.config.d_model; ++c)
            p.layers[0].wo.at(2 * dh + r, c) *= 2.0f;  // power of two: exact

    const amp::ImportanceReport after = amp::compute_importance(p, calib);
    CHECK(after.per_layer[0].head_scores[2] == 2.0 * before.per_layer[0].head_scores[2]);
    CHECK(after.per_layer[0].head_scores[0] == before.per_layer[0].head_scores[0]);
    CHECK(after.per_layer[0].head_scores[1] == before.per_layer[0].head_scores[1]);
    CHECK(after.per_layer[0].head_scores[3] == before.per_layer[0].head_scores[3]);
}

TEST_CASE("a zero-Wv head scores exactly zero and ranks last") {
    amp::TransformerWeights w = amp::init_weights(two_layer_config(), 46);
    const int dh = w.config.d_head;
    for (int r = 0; r < w.config.d_model; ++r)
        for (int c = 0; c < dh; ++c) w.layers[1].wv.at(r, 1 * dh + c) = 0.0f;
    std::mt19937_64 rng(36);
    const auto calib = random_calib(rng, 3, w.config.vocab_size);
    const amp::ImportanceReport report = amp::compute_importance(w, calib);
    CHECK(report.per_layer[1].head_scores[1] == 0.0);
    for (int n : {0, 2, 3})
        CHECK(report.per_layer[1].head_scores[static_cast<std::size_t>(n)] > 0.0);
}

TEST_CASE("scoring is read-only and records the model fingerprint") {
    const amp::TransformerWeights w = amp::init_weights(two_layer_config(), 47);
    const std::string before = amp::io::fingerprint(w);
    const amp::ImportanceReport report = amp::compute_importance(w, {{1, 2, 3, 4}});
    CHECK(amp::io::fingerprint(w) == before);
    CHECK(report.model_fingerprint == before);
}

TEST_CASE("compute_importance validates its calibration set") {
    const amp::TransformerWeights w = amp::init_weights(two_layer_config(), 48);
    CHECK_THROWS_AS(amp::compute_importance(w, {}), amp::ConfigError);
    const std::vector<int> too_long(w.config.max_seq_len + 1, 1);
    try {
        amp::compute_importance(w, {{1, 2}, too_long});
        FAIL("expected ConfigError");
    } catch (const amp::ConfigError& e) {
        CHECK(std::string(e.what()).find("1") != std::string::npos);  // sample index
    }
}

TEST_CASE("importance reports round-trip through JSON") {
    const amp::TransformerWeights w = amp::init_weights(two_layer_config(), 49);
    const amp::ImportanceReport report = amp::compute_importance(w, {{5, 4, 3, 2, 1}});
    const std::string json = amp::report_to_json(report);
    const amp::ImportanceReport back = amp::report_from_json(json);
    CHECK(back.model_fingerprint == report.model_fingerprint);
    CHECK(back.num_samples == report.num_samples);
    CHECK(back.total_tokens == report.total_tokens);
    REQUIRE(back.per_layer.size() == report.per_layer.size());
    for (std::size_t l = 0; l < report.per_layer.size(); ++l) {
        CHECK(back.per_layer[l].head_scores == report.per_layer[l].head_scores);
        CHECK(back.per_layer[l].mlp_scores == report.per_layer[l].mlp_scores);
    }
    CHECK_THROWS_AS(amp::report_from_json("not json"), amp::FormatError);
    CHECK_THROWS_AS(amp::report_from_json("{}"), amp::FormatError);
}
