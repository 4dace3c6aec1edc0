#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "stegbench/lm/distribution.hpp"
#include "stegbench/rng.hpp"

namespace stegbench::codec {

// r = max(0, min(max_r, floor(-log2 p_max))).
int adg_group_bits(double p_max, int max_r);

struct Grouping {
  int bits = 0;                        // r; there are 2^r groups
  std::vector<int> group_of;           // per ranked entry
  std::vector<std::uint64_t> masses;   // quantized mass per group
  std::vector<double> prob_masses;     // mass per group as probabilities

  friend bool operator==(const Grouping&, const Grouping&) = default;
};

// Greedy balanced grouping: entries (ranked, heaviest first) each go to the
// currently lightest group, ties to the lowest group index.
Grouping adg_group(std::span<const lm::Entry> ranked_entries, int max_r);

// Picks a token from `group` proportionally to its probability.
lm::TokenId sample_in_group(std::span<const lm::Entry> ranked_entries, const Grouping& grouping, int group,
                            Rng& rng);

}  // namespace stegbench::codec
