#include "stegbench/lm/scoring.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "stegbench/error.hpp"

namespace stegbench::lm {

ConditionalDistribution next_distribution(const DistributionProvider& provider,
                                          std::span<const TokenId> context) {
  return provider.next(context);
}

double sequence_neg_log_prob(const DistributionProvider& provider, std::span<const TokenId> tokens) {
  if (tokens.empty()) throw Error(ErrorCode::EmptySentence, "cannot score an empty token list");
  std::vector<TokenId> context;
  context.reserve(tokens.size() + 1);
  context.push_back(kBos);
  double nll = 0.0;
  for (TokenId tok : tokens) {
    const double p = provider.next(context).prob(tok);
    if (!(p > 0.0)) return std::numeric_limits<double>::infinity();
    nll -= std::log(p);
    context.push_back(tok);
  }
  return nll;
}

double perplexity_from_nll(double neg_log_prob, std::size_t token_count) {
  if (token_count == 0) throw Error(ErrorCode::EmptySentence, "perplexity of an empty token list");
  return std::exp(neg_log_prob / static_cast<double>(token_count));
}

double perplexity(const DistributionProvider& provider, std::span<const TokenId> tokens) {
  return perplexity_from_nll(sequence_neg_log_prob(provider, tokens), tokens.size());
}

}  // namespace stegbench::lm
