#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "stegbench/lm/vocabulary.hpp"

namespace stegbench::codec {

enum class Algorithm { FLC, HC, AC, ADG };

std::string_view to_string(Algorithm algorithm);
// Accepts "flc", "hc", "ac", "adg" in any case; throws InvalidParams.
Algorithm parse_algorithm(std::string_view name);

struct CodecParams {
  Algorithm algorithm = Algorithm::AC;
  int flc_bits_per_step = 1;
  int hc_pool_size = 32;
  int ac_precision = 64;
  int ac_topk = 0;  // 0 keeps the full support
  int adg_max_r = 8;
  std::size_t max_tokens = 512;
  std::uint64_t rng_seed = 0;

  // Throws InvalidParams when the settings cannot work for a vocabulary of
  // `vocab_size` ids (BOS and EOS are never embedding candidates).
  void validate(std::size_t vocab_size) const;

  friend bool operator==(const CodecParams&, const CodecParams&) = default;
};

struct StegoText {
  std::vector<lm::TokenId> tokens;
  Algorithm algorithm = Algorithm::AC;
  // Header + payload + the zero padding the codec consumed.
  std::size_t embedded_bit_count = 0;
  // Number of leading tokens that carry bits; the rest is sampled tail.
  std::size_t embedding_tokens = 0;
  bool ended_with_eos = false;
  CodecParams params;
};

}  // namespace stegbench::codec
