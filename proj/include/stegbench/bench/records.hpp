#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stegbench/codec/params.hpp"
#include "stegbench/features/features.hpp"
#include "stegbench/label.hpp"
#include "stegbench/lm/ngram_model.hpp"

namespace stegbench::bench {

inline constexpr std::string_view kNatural = "natural";

// One generated dataset: `count` sentences of `source`, either covers
// ("natural") or stegos made by the named codec.
struct DatasetSpec {
  std::string source;
  std::string algorithm;  // natural, flc, hc, ac, adg
  std::size_t count = 0;
  std::uint64_t seed = 0;
  std::optional<codec::CodecParams> codec;  // stego specs only

  bool natural() const { return algorithm == kNatural; }
  // "<source>-<algorithm>", the name used for files and report cells.
  std::string key() const;
  // Throws InvalidConfig.
  void validate() const;
};

struct Record {
  std::string id;
  std::string source;
  std::string algorithm;
  Label label = Label::Cover;
  std::vector<lm::TokenId> tokens;
  std::string text;
  std::uint64_t seed = 0;          // cover sampling seed or codec rng seed
  std::string payload_bits;        // '0'/'1' characters, stegos only
  std::size_t embedded_bit_count = 0;
  features::SentenceFeatures features;
};

struct SynthesisOptions {
  std::size_t payload_bits = 64;
  // Fresh payloads tried per sentence before giving up.
  int max_attempts = 16;
};

// Generates `spec.count` records. Covers are ancestral samples (empty samples
// are redrawn); stegos embed a fresh random payload, and a CapacityExceeded
// sentence is retried with a new payload. Throws GenerationStalled once a
// sentence exhausts its attempts.
std::vector<Record> synthesize_dataset(const lm::NGramModel& model, const DatasetSpec& spec,
                                       const SynthesisOptions& options);

// corpora/<key>.txt holds one sentence per line; <key>.meta.jsonl holds the
// per-record metadata in the same order. Throws IoError.
void write_corpus(const std::filesystem::path& dir, const DatasetSpec& spec, std::span<const Record> records);

}  // namespace stegbench::bench
