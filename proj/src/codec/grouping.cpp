#include "stegbench/codec/grouping.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "stegbench/codec/huffman.hpp"
#include "stegbench/error.hpp"

namespace stegbench::codec {

int adg_group_bits(double p_max, int max_r) {
  if (!(p_max > 0.0)) throw Error(ErrorCode::InvalidParams, "p_max must be positive");
  const double r = std::floor(-std::log2(p_max));
  if (r <= 0.0) return 0;
  return static_cast<int>(std::min<double>(r, max_r));
}

Grouping adg_group(std::span<const lm::Entry> ranked_entries, int max_r) {
  if (ranked_entries.empty()) throw Error(ErrorCode::InvalidParams, "empty distribution");
  Grouping g;
  g.bits = adg_group_bits(ranked_entries.front().prob, max_r);
  while (g.bits > 0 && (std::size_t{1} << g.bits) > ranked_entries.size()) --g.bits;
  const std::size_t groups = std::size_t{1} << g.bits;
  g.masses.assign(groups, 0);
  g.prob_masses.assign(groups, 0.0);
  g.group_of.resize(ranked_entries.size());

  using Key = std::pair<std::uint64_t, std::size_t>;  // (mass, group index)
  std::priority_queue<Key, std::vector<Key>, std::greater<>> lightest;
  for (std::size_t i = 0; i < groups; ++i) lightest.emplace(0, i);
  for (std::size_t i = 0; i < ranked_entries.size(); ++i) {
    auto [mass, group] = lightest.top();
    lightest.pop();
    const std::uint64_t w = quantize_probability(ranked_entries[i].prob);
    g.group_of[i] = static_cast<int>(group);
    g.masses[group] = mass + w;
    g.prob_masses[group] += ranked_entries[i].prob;
    lightest.emplace(mass + w, group);
  }
  return g;
}

lm::TokenId sample_in_group(std::span<const lm::Entry> ranked_entries, const Grouping& grouping, int group,
                            Rng& rng) {
  double mass = 0.0;
  std::size_t last = ranked_entries.size();
  for (std::size_t i = 0; i < ranked_entries.size(); ++i) {
    if (grouping.group_of[i] == group) {
      mass += ranked_entries[i].prob;
      last = i;
    }
  }
  if (last == ranked_entries.size()) throw Error(ErrorCode::InvalidParams, "empty ADG group");
  const double target = rng.uniform() * mass;
  double acc = 0.0;
  for (std::size_t i = 0; i < ranked_entries.size(); ++i) {
    if (grouping.group_of[i] != group) continue;
    acc += ranked_entries[i].prob;
    if (target < acc) return ranked_entries[i].token;
  }
  return ranked_entries[last].token;
}

}  // namespace stegbench::codec
