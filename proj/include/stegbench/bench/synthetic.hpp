#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace stegbench::bench {

// Style profile of a synthetic corpus. Words are pseudo-words drawn from a
// Zipf law; each word has a short list of preferred successors that the next
// word follows with probability `follow`, which gives the corpus local
// structure for the n-gram model to pick up.
struct CorpusPreset {
  std::string name;
  std::size_t vocab = 1000;
  double zipf = 1.0;
  std::size_t branching = 10;
  double follow = 0.7;
  double mean_length = 20.0;
  double sd_length = 8.0;
};

// "movie", "news" or "tweet". Throws InvalidConfig.
const CorpusPreset& find_preset(std::string_view name);
const std::vector<CorpusPreset>& presets();

// Space-joined sentences; identical for identical (preset, count, seed).
std::vector<std::string> synthesize_sentences(const CorpusPreset& preset, std::size_t count, std::uint64_t seed);

}  // namespace stegbench::bench
