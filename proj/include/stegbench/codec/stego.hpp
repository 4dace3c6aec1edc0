#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "stegbench/codec/arithmetic.hpp"
#include "stegbench/codec/grouping.hpp"
#include "stegbench/codec/params.hpp"
#include "stegbench/codec/payload.hpp"
#include "stegbench/lm/distribution.hpp"
#include "stegbench/rng.hpp"

namespace stegbench::codec {

// Everything one step of a codec needs to map bits to tokens and back. Built
// by build_codebook() on both the embedding and the extraction side.
struct StepCodebook {
  Algorithm algorithm = Algorithm::AC;
  std::vector<lm::Entry> pool;           // ranked candidates
  std::vector<Bits> codes;               // FLC, HC: codeword per pool entry
  Grouping grouping;                     // ADG
  std::vector<Subinterval> intervals;    // AC

  // Index into pool of `token`, if it is a candidate this step.
  std::optional<std::size_t> find(lm::TokenId token) const;

  friend bool operator==(const StepCodebook&, const StepCodebook&) = default;
};

// `interval` is required for AC and ignored otherwise.
StepCodebook build_codebook(const lm::ConditionalDistribution& dist, const CodecParams& params,
                            const ArithmeticState* interval = nullptr);

// The distribution used while bits remain: EOS removed and the rest rescaled.
lm::ConditionalDistribution embedding_distribution(const lm::DistributionProvider& provider,
                                                   std::span<const lm::TokenId> context);

// Draws a token proportionally to the entry probabilities.
lm::TokenId sample_token(const lm::ConditionalDistribution& dist, Rng& rng);

// Embeds the framed payload, then keeps sampling until EOS or max_tokens.
// Throws InvalidParams or CapacityExceeded.
StegoText encode(const lm::DistributionProvider& provider, const Payload& payload, const CodecParams& params);

// Recovers the payload from the leading tokens; ignores anything after the
// framed bits. Throws TruncatedStego or DesyncError.
Payload decode(const lm::DistributionProvider& provider, std::span<const lm::TokenId> tokens,
               const CodecParams& params);

// Ancestral sampling at temperature 1. EOS ends the sentence and is not
// included in the result.
std::vector<lm::TokenId> generate_cover(const lm::DistributionProvider& provider, std::uint64_t seed,
                                        std::size_t max_tokens);

// Expected payload bits one step carries for `dist`:
//   FLC  b
//   HC   sum p_i * len(code_i) over the renormalized pool
//   ADG  r
//   AC   entropy in bits of the (top-k renormalized) distribution
double step_capacity(Algorithm algorithm, const lm::ConditionalDistribution& dist, const CodecParams& params);

}  // namespace stegbench::codec
