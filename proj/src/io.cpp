#include "amp/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iostream>
#include <random>

#include "json.hpp"

#include "amp/error.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

namespace amp::io {

using nlohmann::json;

namespace {

constexpr char kMagic[4] = {'A', 'M', 'P', 'C'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    return v;
}

std::uint64_t get_u64(const std::uint8_t* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
}

json config_to_json(const ModelConfig& c) {
    return json{{"vocab_size", c.vocab_size},
                {"d_model", c.d_model},
                {"n_layers", c.n_layers},
                {"n_heads", c.n_heads},
                {"d_head", c.d_head},
                {"d_intermediate", c.d_intermediate},
                {"max_seq_len", c.max_seq_len},
                {"rms_norm_eps", static_cast<double>(c.rms_norm_eps)},
                {"rope_theta", static_cast<double>(c.rope_theta)}};
}

ModelConfig config_from_json(const json& j) {
    ModelConfig c;
    try {
        c.vocab_size = j.at("vocab_size").get<int>();
        c.d_model = j.at("d_model").get<int>();
        c.n_layers = j.at("n_layers").get<int>();
        c.n_heads = j.at("n_heads").get<int>();
        c.d_head = j.at("d_head").get<int>();
        c.d_intermediate = j.at("d_intermediate").get<int>();
        c.max_seq_len = j.at("max_seq_len").get<int>();
        c.rms_norm_eps = static_cast<float>(j.at("rms_norm_eps").get<double>());
        c.rope_theta = static_cast<float>(j.at("rope_theta").get<double>());
    } catch (const json::exception& e) {
        throw FormatError(std::string("bad config in checkpoint header: ") + e.what());
    }
    return c;
}

// Canonical tensor name sequence for a model with n_layers layers; the
// manifest must list exactly these, in this order.
std::vector<std::string> canonical_names(int n_layers) {
    std::vector<std::string> names;
    names.emplace_back("token_embedding");
    for (int l = 0; l < n_layers; ++l) {
        const std::string p = "layers." + std::to_string(l) + ".";
        for (const char* s : {"attn_norm", "Wq", "Wk", "Wv", "Wo", "mlp_norm",
                              "Wgate", "Wup", "Wdown"}) {
            names.push_back(p + s);
        }
    }
    names.emplace_back("final_norm");
    names.emplace_back("lm_head");
    return names;
}

}  // namespace

std::vector<int> encode(const std::string& text) {
    std::vector<int> ids;
    ids.reserve(text.size());
    for (unsigned char b : text) ids.push_back(static_cast<int>(b));
    return ids;
}

std::string decode(const std::vector<int>& ids) {
    std::string out;
    out.reserve(ids.size());
    for (int id : ids) {
        if (id >= 0 && id < 256) out.push_back(static_cast<char>(id));
    }
    return out;
}

std::vector<std::uint8_t> serialize_checkpoint(const TransformerWeights& w) {
    validate_weights(w);
    json manifest = json::array();
    std::uint64_t offset = 0;
    std::size_t payload_floats = 0;
    for_each_tensor(w, [&](const std::string& name, const Tensor& t) {
        manifest.push_back(json{{"name", name}, {"shape", t.shape}, {"byte_offset", offset}});
        offset += t.size() * sizeof(float);
        payload_floats += t.size();
    });
    json header = json{{"config", config_to_json(w.config)}, {"tensors", manifest}};
    const std::string header_str = header.dump();

    std::vector<std::uint8_t> out;
    out.reserve(16 + header_str.size() + payload_floats * sizeof(float));
    out.insert(out.end(), kMagic, kMagic + 4);
    put_u32(out, kFormatVersion);
    put_u64(out, header_str.size());
    out.insert(out.end(), header_str.begin(), header_str.end());
    for_each_tensor(w, [&](const std::string&, const Tensor& t) {
        const auto* bytes = reinterpret_cast<const std::uint8_t*>(t.data.data());
        out.insert(out.end(), bytes, bytes + t.size() * sizeof(float));
    });
    return out;
}

TransformerWeights parse_checkpoint(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 16) throw FormatError("checkpoint truncated: shorter than fixed header");
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw FormatError("bad magic: not an AMPC checkpoint");
    }
    const std::uint32_t version = get_u32(bytes.data() + 4);
    if (version != kFormatVersion) {
        throw FormatError("unsupported format version " + std::to_string(version) +
                          " (expected " + std::to_string(kFormatVersion) + ")");
    }
    const std::uint64_t header_len = get_u64(bytes.data() + 8);
    if (16 + header_len > bytes.size()) {
        throw FormatError("checkpoint truncated: header extends past end of data");
    }
    json header;
    try {
        header = json::parse(bytes.begin() + 16, bytes.begin() + 16 + static_cast<std::ptrdiff_t>(header_len));
    } catch (const json::exception& e) {
        throw FormatError(std::string("bad checkpoint header JSON: ") + e.what());
    }
    const ModelConfig cfg = config_from_json(header.at("config"));
    cfg.validate();

    if (!header.contains("tensors") || !header["tensors"].is_array()) {
        throw FormatError("checkpoint header missing tensor manifest");
    }
    const json& manifest = header["tensors"];
    const std::vector<std::string> expected = canonical_names(cfg.n_layers);
    if (manifest.size() != expected.size()) {
        throw FormatError("tensor manifest has " + std::to_string(manifest.size()) +
                          " entries, expected " + std::to_string(expected.size()));
    }

    const std::uint8_t* payload = bytes.data() + 16 + header_len;
    const std::uint64_t payload_len = bytes.size() - 16 - header_len;

    std::vector<Tensor> tensors;
    tensors.reserve(expected.size());
    std::uint64_t offset = 0;
    for (std::size_t i = 0; i < expected.size(); ++i) {
        const json& entry = manifest[i];
        std::string name;
        std::vector<int> shape;
        std::uint64_t byte_offset = 0;
        try {
            name = entry.at("name").get<std::string>();
            shape = entry.at("shape").get<std::vector<int>>();
            byte_offset = entry.at("byte_offset").get<std::uint64_t>();
        } catch (const json::exception& e) {
            throw FormatError("bad manifest entry " + std::to_string(i) + ": " + e.what());
        }
        if (name != expected[i]) {
            throw FormatError("tensor manifest out of canonical order: entry " +
                              std::to_string(i) + " is '" + name + "', expected '" +
                              expected[i] + "'");
        }
        if (byte_offset != offset) {
            throw FormatError("tensor " + name + " at byte offset " +
                              std::to_string(byte_offset) + ", expected gap-free " +
                              std::to_string(offset));
        }
        std::uint64_t count = 1;
        for (int d : shape) {
            if (d < 1) throw FormatError("tensor " + name + " has non-positive dimension");
            count *= static_cast<std::uint64_t>(d);
        }
        const std::uint64_t nbytes = count * sizeof(float);
        if (offset + nbytes > payload_len) {
            throw FormatError("checkpoint truncated: tensor " + name +
                              " extends past end of payload");
        }
        Tensor t(shape);
        std::memcpy(t.data.data(), payload + offset, nbytes);
        tensors.push_back(std::move(t));
        offset += nbytes;
    }
    if (offset != payload_len) {
        throw FormatError("checkpoint payload has " + std::to_string(payload_len - offset) +
                          " trailing bytes beyond the tensor manifest");
    }

    TransformerWeights w;
    w.config = cfg;
    std::size_t idx = 0;
    w.token_embedding = std::move(tensors[idx++]);
    w.layers.resize(static_cast<std::size_t>(cfg.n_layers));
    for (auto& lw : w.layers) {
        lw.attn_norm = std::move(tensors[idx++]);
        lw.wq = std::move(tensors[idx++]);
        lw.wk = std::move(tensors[idx++]);
        lw.wv = std::move(tensors[idx++]);
        lw.wo = std::move(tensors[idx++]);
        lw.mlp_norm = std::move(tensors[idx++]);
        lw.w_gate = std::move(tensors[idx++]);
        lw.w_up = std::move(tensors[idx++]);
        lw.w_down = std::move(tensors[idx++]);
        if (lw.wq.rank() != 2 || lw.wq.cols() % cfg.d_head != 0) {
            throw FormatError("Wq width is not a multiple of d_head");
        }
        lw.n_heads = lw.wq.cols() / cfg.d_head;
        if (lw.w_gate.rank() != 2) throw FormatError("Wgate must be rank 2");
        lw.d_intermediate = lw.w_gate.cols();
    }
    w.final_norm = std::move(tensors[idx++]);
    w.lm_head = std::move(tensors[idx++]);
    validate_weights(w);
    return w;
}

void save_checkpoint(const TransformerWeights& w, const std::string& path) {
    const std::vector<std::uint8_t> bytes = serialize_checkpoint(w);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open for writing: " + path);
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
    if (!f) throw IoError("write failed: " + path);
}

TransformerWeights load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                    std::istreambuf_iterator<char>());
    if (f.bad()) throw IoError("read failed: " + path);
    return parse_checkpoint(bytes);
}

std::string sha256_hex(const std::uint8_t* data, std::size_t len) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int md_len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx, data, len) != 1 ||
        EVP_DigestFinal_ex(ctx, md, &md_len) != 1) {
        EVP_MD_CTX_free(ctx);
        throw Error("sha256 digest failed");
    }
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(md_len * 2);
    for (unsigned int i = 0; i < md_len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 0xf]);
    }
    return out;
}

std::string fingerprint(const TransformerWeights& w) {
    const std::vector<std::uint8_t> bytes = serialize_checkpoint(w);
    return sha256_hex(bytes.data(), bytes.size());
}

std::string fingerprint_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                    std::istreambuf_iterator<char>());
    if (f.bad()) throw IoError("read failed: " + path);
    return sha256_hex(bytes.data(), bytes.size());
}

std::vector<std::vector<int>> load_calibration(const std::string& path,
                                               int max_samples, int max_len,
                                               std::uint64_t seed) {
    if (max_samples < 1) throw ConfigError("max_samples must be >= 1");
    if (max_len < 1) throw ConfigError("max_len must be >= 1");
    const std::string text = read_file(path);

    std::vector<std::vector<int>> samples;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        std::size_t len = end - start;
        if (len > 0 && text[start + len - 1] == '\r') --len;
        if (len > 0) {
            std::vector<int> ids = encode(text.substr(start, len));
            if (static_cast<int>(ids.size()) > max_len) {
                ids.resize(static_cast<std::size_t>(max_len));
            }
            samples.push_back(std::move(ids));
        }
        if (end == text.size()) break;
        start = end + 1;
    }
    if (samples.empty()) throw IoError("calibration file has no nonempty lines: " + path);

    const std::size_t n = samples.size();
    if (n <= static_cast<std::size_t>(max_samples)) {
        if (n < static_cast<std::size_t>(max_samples)) {
            std::cerr << "warning: calibration file has only " << n << " samples, "
                      << max_samples << " requested; using all " << n << "\n";
        }
        return samples;
    }
    // Partial Fisher-Yates over indices; modulo draw keeps selection
    // identical across standard library implementations.
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = 0; i < static_cast<std::size_t>(max_samples); ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng() % (n - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(static_cast<std::size_t>(max_samples));
    std::sort(idx.begin(), idx.end());
    std::vector<std::vector<int>> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(std::move(samples[i]));
    return out;
}

std::vector<int> load_corpus(const std::string& path) {
    return encode(read_file(path));
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path);
    std::string out((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (f.bad()) throw IoError("read failed: " + path);
    return out;
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open for writing: " + path);
    f << contents;
    if (!f) throw IoError("write failed: " + path);
}

}  // namespace amp::io
