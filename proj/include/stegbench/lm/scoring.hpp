#pragma once

#include <span>

#include "stegbench/lm/distribution.hpp"

namespace stegbench::lm {

ConditionalDistribution next_distribution(const DistributionProvider& provider,
                                          std::span<const TokenId> context);

// -sum_i ln p(x_i | BOS, x_1..x_{i-1}) in nats. Throws EmptySentence.
double sequence_neg_log_prob(const DistributionProvider& provider, std::span<const TokenId> tokens);

// exp(sequence_neg_log_prob / N), computed from the same value.
double perplexity(const DistributionProvider& provider, std::span<const TokenId> tokens);
double perplexity_from_nll(double neg_log_prob, std::size_t token_count);

}  // namespace stegbench::lm
