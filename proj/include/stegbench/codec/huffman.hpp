#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "stegbench/codec/payload.hpp"
#include "stegbench/lm/distribution.hpp"

namespace stegbench::codec {

// Fixed-point weight used wherever a codec needs exact comparisons between
// probabilities (Huffman merges, group masses).
std::uint64_t quantize_probability(double p);

// Huffman codes for `pool`, which must already be in ranked order. Merges take
// the two nodes with the smallest (weight, creation index), leaves being
// created in pool order. At each internal node the heavier child gets bit 0;
// on equal weight the child holding the smaller token id gets bit 0.
std::vector<Bits> huffman_codes(std::span<const lm::Entry> pool);

}  // namespace stegbench::codec
