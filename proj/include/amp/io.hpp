#pragma once

// Checkpoint serialization, byte-level tokenizer, and text ingestion.
//
// Checkpoint layout (".ampc"):
//   magic "AMPC" | u32 LE format version | u64 LE header length |
//   UTF-8 JSON header {config, tensors:[{name, shape, byte_offset}]} |
//   payload: concatenated row-major little-endian f32 tensor data.
// Manifest order equals payload order; offsets are strictly increasing
// and gap-free. save(load(x)) reproduces x byte for byte.

#include <cstdint>
#include <string>
#include <vector>

#include "amp/model.hpp"

namespace amp::io {

inline constexpr int kBosToken = 256;  // bytes occupy ids 0..255
inline constexpr std::uint32_t kFormatVersion = 1;

// Byte-level tokenizer: token id == byte value.
std::vector<int> encode(const std::string& text);
std::string decode(const std::vector<int>& ids);  // ids >= 256 are dropped

// In-memory checkpoint bytes; deterministic for identical weights.
std::vector<std::uint8_t> serialize_checkpoint(const TransformerWeights& w);
TransformerWeights parse_checkpoint(const std::vector<std::uint8_t>& bytes);

void save_checkpoint(const TransformerWeights& w, const std::string& path);
TransformerWeights load_checkpoint(const std::string& path);

// SHA-256 hex digest of arbitrary bytes.
std::string sha256_hex(const std::uint8_t* data, std::size_t len);

// Content hash of a model: SHA-256 over its serialized checkpoint bytes.
// Equals sha256 of the file written by save_checkpoint.
std::string fingerprint(const TransformerWeights& w);
std::string fingerprint_file(const std::string& path);

// One sample per line; nonempty lines are byte-tokenized, truncated to
// max_len tokens, then subsampled to max_samples without replacement
// (seeded, deterministic). Fewer lines than max_samples: take all and
// warn on stderr.
std::vector<std::vector<int>> load_calibration(const std::string& path,
                                               int max_samples, int max_len,
                                               std::uint64_t seed);

// Whole-file byte-level tokenization.
std::vector<int> load_corpus(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace amp::io
