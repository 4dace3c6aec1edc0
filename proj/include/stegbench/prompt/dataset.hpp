#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "stegbench/label.hpp"

namespace stegbench::prompt {

struct LabeledSentence {
  std::string id;
  std::string text;
  Label label = Label::Cover;
  std::string source;
  std::string algorithm;
};

struct InstructionRecord {
  std::string prompt;      // inference prompt, ends at the answer marker
  std::string completion;  // label string for true_label
  Label true_label = Label::Cover;
  std::string source;
  std::string algorithm;
  std::string id;

  friend bool operator==(const InstructionRecord&, const InstructionRecord&) = default;
};

InstructionRecord make_instruction(const LabeledSentence& sentence, int template_id);

struct SplitSizes {
  std::size_t train = 0;
  std::size_t valid = 0;
  std::size_t test = 0;
};

// 3:1:1 by flooring each share of n, then handing the leftover records to
// train, valid and test in that order.
SplitSizes split_sizes(std::size_t n);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> valid;
  std::vector<std::size_t> test;
};

// Stratified 3:1:1 split. Each stratum (records sharing a key) is shuffled
// with a seed derived from (seed, key); record i of a stratum of size m is
// placed at position (i + 1/2) / m and the strata are merged by that position
// (ties by key), so every prefix of the merged order holds each stratum in
// proportion. The merged order is then cut by split_sizes(n).
SplitIndices stratified_split(std::span<const std::string> stratum_keys, std::uint64_t seed);

std::string stratum_key(const LabeledSentence& sentence);

struct DatasetSplits {
  std::vector<InstructionRecord> train;
  std::vector<InstructionRecord> valid;
  std::vector<InstructionRecord> test;
};

// Throws DegenerateDataset unless both labels occur.
DatasetSplits build_dataset(std::span<const LabeledSentence> records, int template_id, std::uint64_t split_seed);

// One JSON object per line with fields prompt, completion, true_label,
// source, algorithm, id (in that order).
void write_records(const std::filesystem::path& path, std::span<const InstructionRecord> records);
std::vector<InstructionRecord> read_records(const std::filesystem::path& path);

// Writes train.jsonl, valid.jsonl and test.jsonl under `dir`.
void write_dataset(const std::filesystem::path& dir, const DatasetSplits& splits);

// A model answer produced for a prompt record: {"id", "answer", "latency_ms"}.
struct InferenceAnswer {
  std::string id;
  std::string answer;
  double latency_ms = 0.0;
};

std::vector<InferenceAnswer> read_answers(const std::filesystem::path& path);

}  // namespace stegbench::prompt
