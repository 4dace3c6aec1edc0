#include "stegbench/bench/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <unordered_set>

#include "stegbench/error.hpp"
#include "stegbench/rng.hpp"

namespace stegbench::bench {

namespace {

constexpr std::array<std::string_view, 16> kSyllables = {"ka", "lo", "mi", "ne", "ru", "sa", "ti", "vo",
                                                         "ba", "de", "fu", "go", "hi", "ja", "pe", "zu"};

// Distinct pseudo-words, shortest first so frequent words stay short.
std::vector<std::string> make_words(std::size_t count) {
  std::vector<std::string> words;
  words.reserve(count);
  std::vector<std::string> level = {""};
  while (words.size() < count) {
    std::vector<std::string> next;
    for (const auto& stem : level) {
      for (auto syl : kSyllables) {
        next.push_back(stem + std::string(syl));
        if (words.size() < count) words.push_back(next.back());
      }
    }
    level = std::move(next);
  }
  return words;
}

std::vector<double> zipf_cdf(std::size_t n, double s) {
  std::vector<double> cdf(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += 1.0 / std::pow(static_cast<double>(i + 1), s);
    cdf[i] = acc;
  }
  for (auto& c : cdf) c /= acc;
  return cdf;
}

std::size_t draw(const std::vector<double>& cdf, Rng& rng) {
  const double u = rng.uniform();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

double gaussian(Rng& rng) {
  // Box-Muller on our own uniform draw keeps the output platform independent.
  const double u1 = 1.0 - rng.uniform();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

const std::vector<CorpusPreset>& presets() {
  static const std::vector<CorpusPreset> kPresets = {
      {"movie", 1500, 1.05, 12, 0.70, 25.6, 10.0},
      {"news", 1200, 1.00, 10, 0.75, 23.1, 8.0},
      {"tweet", 2000, 0.90, 30, 0.50, 10.7, 5.0},
  };
  return kPresets;
}

const CorpusPreset& find_preset(std::string_view name) {
  for (const auto& p : presets()) {
    if (p.name == name) return p;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown corpus preset: " + std::string(name));
}

std::vector<std::string> synthesize_sentences(const CorpusPreset& preset, std::size_t count, std::uint64_t seed) {
  if (preset.vocab < 2 || preset.branching == 0 || preset.mean_length < 1.0 || preset.follow < 0.0 ||
      preset.follow > 1.0) {
    throw Error(ErrorCode::InvalidConfig, "invalid corpus preset " + preset.name);
  }
  const auto words = make_words(preset.vocab);
  const auto global = zipf_cdf(preset.vocab, preset.zipf);
  const std::size_t branching = std::min(preset.branching, preset.vocab);
  const auto local = zipf_cdf(branching, 1.0);

  // The successor table is part of the language, so it depends on the preset
  // only; the seed drives the sentences.
  Rng table_rng(derive_seed(0, "successors:" + preset.name));
  std::vector<std::vector<std::size_t>> successors(preset.vocab);
  for (auto& list : successors) {
    std::unordered_set<std::size_t> seen;
    while (list.size() < branching) {
      const std::size_t w = draw(global, table_rng);
      if (seen.insert(w).second) list.push_back(w);
    }
  }

  Rng rng(derive_seed(seed, "sentences:" + preset.name));
  std::vector<std::string> out;
  out.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    const double len = std::round(preset.mean_length + preset.sd_length * gaussian(rng));
    const std::size_t n = static_cast<std::size_t>(std::max(1.0, len));
    std::string sentence;
    std::size_t prev = draw(global, rng);
    sentence += words[prev];
    for (std::size_t i = 1; i < n; ++i) {
      prev = rng.uniform() < preset.follow ? successors[prev][draw(local, rng)] : draw(global, rng);
      sentence += ' ';
      sentence += words[prev];
    }
    out.push_back(std::move(sentence));
  }
  return out;
}

}  // namespace stegbench::bench
