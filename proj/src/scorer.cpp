#include "amp/scorer.hpp"

#include <cmath>

#include "json.hpp"

#include "amp/error.hpp"
#include "amp/io.hpp"

namespace amp {

using nlohmann::json;

std::vector<double> score_heads_layer(const std::vector<Tensor>& contribs) {
    if (contribs.empty()) throw ConfigError("score_heads_layer: empty contribution list");
    const int s = contribs.front().rows();
    std::vector<double> scores;
    scores.reserve(contribs.size());
    for (const Tensor& c : contribs) {
        if (c.shape != contribs.front().shape) {
            throw ShapeError("score_heads_layer: contribution shape mismatch " +
                             c.shape_str() + " vs " + contribs.front().shape_str());
        }
        scores.push_back(l1_norm(c) / s);
    }
    return scores;
}

std::vector<double> score_mlp_layer(const Tensor& down_input) {
    if (down_input.rank() != 2) {
        throw ShapeError("score_mlp_layer: expected rank 2, got " + down_input.shape_str());
    }
    const int s = down_input.rows(), d_i = down_input.cols();
    std::vector<double> scores(static_cast<std::size_t>(d_i), 0.0);
    for (int i = 0; i < s; ++i) {
        const float* row = down_input.row(i);
        for (int m = 0; m < d_i; ++m) scores[static_cast<std::size_t>(m)] += std::fabs(row[m]);
    }
    for (double& v : scores) v /= s;
    return scores;
}

ImportanceReport compute_importance(const TransformerWeights& w,
                                    const std::vector<std::vector<int>>& calib) {
    validate_weights(w);
    if (calib.empty()) throw ConfigError("compute_importance: empty calibration set");
    for (std::size_t i = 0; i < calib.size(); ++i) {
        if (calib[i].empty()) {
            throw ConfigError("calibration sample " + std::to_string(i) + " is empty");
        }
        if (static_cast<int>(calib[i].size()) > w.config.max_seq_len) {
            throw ConfigError("calibration sample " + std::to_string(i) + " has " +
                              std::to_string(calib[i].size()) + " tokens, max_seq_len is " +
                              std::to_string(w.config.max_seq_len));
        }
    }

    ImportanceReport report;
    report.model_fingerprint = io::fingerprint(w);
    report.num_samples = static_cast<int>(calib.size());
    report.per_layer.resize(w.layers.size());
    for (std::size_t l = 0; l < w.layers.size(); ++l) {
        report.per_layer[l].head_scores.assign(
            static_cast<std::size_t>(w.layers[l].n_heads), 0.0);
        report.per_layer[l].mlp_scores.assign(
            static_cast<std::size_t>(w.layers[l].d_intermediate), 0.0);
    }

    for (const std::vector<int>& sample : calib) {
        report.total_tokens += static_cast<long long>(sample.size());
        ForwardCapture capture;
        forward(w, sample, &capture);
        for (std::size_t l = 0; l < w.layers.size(); ++l) {
            const std::vector<double> hs = score_heads_layer(capture.layers[l].head_contribs);
            const std::vector<double> ms = score_mlp_layer(capture.layers[l].down_input);
            for (std::size_t h = 0; h < hs.size(); ++h) report.per_layer[l].head_scores[h] += hs[h];
            for (std::size_t m = 0; m < ms.size(); ++m) report.per_layer[l].mlp_scores[m] += ms[m];
        }
    }
    for (LayerScores& ls : report.per_layer) {
        for (double& v : ls.head_scores) v /= report.num_samples;
        for (double& v : ls.mlp_scores) v /= report.num_samples;
    }
    return report;
}

std::string report_to_json(const ImportanceReport& report) {
    json layers = json::array();
    for (const LayerScores& ls : report.per_layer) {
        layers.push_back(json{{"head_scores", ls.head_scores}, {"mlp_scores", ls.mlp_scores}});
    }
    json j{{"version", 1},
           {"model_fingerprint", report.model_fingerprint},
           {"num_samples", report.num_samples},
           {"total_tokens", report.total_tokens},
           {"layers", layers}};
    return j.dump(2) + "\n";
}

ImportanceReport report_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw FormatError(std::string("bad importance report JSON: ") + e.what());
    }
    ImportanceReport report;
    try {
        if (j.at("version").get<int>() != 1) {
            throw FormatError("unsupported importance report version");
        }
        report.model_fingerprint = j.at("model_fingerprint").get<std::string>();
        report.num_samples = j.at("num_samples").get<int>();
        report.total_tokens = j.at("total_tokens").get<long long>();
        for (const json& layer : j.at("layers")) {
            LayerScores ls;
            ls.head_scores = layer.at("head_scores").get<std::vector<double>>();
            ls.mlp_scores = layer.at("mlp_scores").get<std::vector<double>>();
            report.per_layer.push_back(std::move(ls));
        }
    } catch (const json::exception& e) {
        throw FormatError(std::string("bad importance report fields: ") + e.what());
    }
    return report;
}

}  // namespace amp
