#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stegbench/bench/records.hpp"
#include "stegbench/codec/params.hpp"
#include "stegbench/detect/detector.hpp"
#include "stegbench/lm/ngram_model.hpp"

namespace stegbench::bench {

enum class Mode { DomainSpecific, DomainAgnostic, General };

std::string_view to_string(Mode mode);
// Throws InvalidConfig.
Mode parse_mode(std::string_view name);

// Where a source's LM training text comes from: a synthetic preset or a
// user corpus with one sentence per line.
struct SourceConfig {
  std::optional<std::string> preset;
  std::size_t sentences = 3000;
  std::optional<std::filesystem::path> corpus;
};

// Commands of an external fine-tuning adapter. The bench only records them;
// it writes the prompt files the adapter consumes under prompts/.
struct AdapterConfig {
  std::string finetune;
  std::string infer;
};

struct ExperimentConfig {
  Mode mode = Mode::DomainSpecific;
  std::uint64_t seed = 0;
  int template_id = 2;
  std::string provider = "ngram";
  std::filesystem::path output_dir;
  lm::NGramConfig lm;
  std::map<std::string, SourceConfig> sources;
  codec::CodecParams codec;
  SynthesisOptions synthesis;
  std::vector<DatasetSpec> train;
  std::vector<DatasetSpec> test;
  detect::TrainConfig detector;
  std::optional<AdapterConfig> adapter;

  // Fills defaults (sources, the general-mode mix, dataset seeds) and checks
  // every invariant. Throws InvalidConfig.
  void finalize();
};

// Parses the JSON config described in the README. Relative corpus paths are
// resolved against `base_dir`. Throws InvalidConfig or IoError.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

// Default general-mode training mix: movie-ac x10000 and tweet-hc x5000.
std::vector<DatasetSpec> default_general_train();
// Default general-mode test cells, including the unseen news source.
std::vector<DatasetSpec> default_general_test();

}  // namespace stegbench::bench
