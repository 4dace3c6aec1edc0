#include "stegbench/codec/params.hpp"

#include <cctype>
#include <string>

#include "stegbench/error.hpp"

namespace stegbench::codec {

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::FLC: return "flc";
    case Algorithm::HC: return "hc";
    case Algorithm::AC: return "ac";
    case Algorithm::ADG: return "adg";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  std::string lower(name);
  for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "flc") return Algorithm::FLC;
  if (lower == "hc") return Algorithm::HC;
  if (lower == "ac") return Algorithm::AC;
  if (lower == "adg") return Algorithm::ADG;
  throw Error(ErrorCode::InvalidParams, "unknown algorithm '" + std::string(name) + "'");
}

void CodecParams::validate(std::size_t vocab_size) const {
  // BOS is never predicted and EOS is masked while embedding.
  const std::size_t candidates = vocab_size > 2 ? vocab_size - 2 : 0;
  if (max_tokens < 1) throw Error(ErrorCode::InvalidParams, "max_tokens must be >= 1");
  switch (algorithm) {
    case Algorithm::FLC:
      if (flc_bits_per_step < 1 || flc_bits_per_step > 24) {
        throw Error(ErrorCode::InvalidParams, "flc_bits_per_step must be in [1, 24]");
      }
      if ((std::size_t{1} << flc_bits_per_step) > candidates) {
        throw Error(ErrorCode::InvalidParams, "FLC pool 2^" + std::to_string(flc_bits_per_step) +
                                                  " exceeds the " + std::to_string(candidates) +
                                                  " embeddable tokens");
      }
      break;
    case Algorithm::HC:
      if (hc_pool_size < 2) throw Error(ErrorCode::InvalidParams, "hc_pool_size must be >= 2");
      if (static_cast<std::size_t>(hc_pool_size) > vocab_size) {
        throw Error(ErrorCode::InvalidParams, "hc_pool_size exceeds vocabulary size");
      }
      break;
    case Algorithm::AC:
      if (ac_precision < 16 || ac_precision > 64) throw Error(ErrorCode::InvalidParams, "ac_precision must be in [16, 64]");
      if (ac_topk < 0 || ac_topk == 1) throw Error(ErrorCode::InvalidParams, "ac_topk must be 0 or >= 2");
      break;
    case Algorithm::ADG:
      if (adg_max_r < 1 || adg_max_r > 16) throw Error(ErrorCode::InvalidParams, "adg_max_r must be in [1, 16]");
      break;
  }
}

}  // namespace stegbench::codec
