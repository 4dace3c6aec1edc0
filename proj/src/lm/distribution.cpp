#include "stegbench/lm/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "stegbench/error.hpp"

namespace stegbench::lm {

double ConditionalDistribution::prob(TokenId token) const {
  for (const auto& e : entries_) {
    if (e.token == token) return e.prob;
  }
  return 0.0;
}

double ConditionalDistribution::total() const {
  double sum = 0.0;
  for (const auto& e : entries_) sum += e.prob;
  return sum;
}

void ConditionalDistribution::validate() const {
  if (entries_.empty()) throw Error(ErrorCode::InvalidParams, "empty distribution");
  std::unordered_set<TokenId> seen;
  for (const auto& e : entries_) {
    if (!(e.prob > 0.0)) {
      throw Error(ErrorCode::InvalidParams, "non-positive probability for token " + std::to_string(e.token));
    }
    if (!seen.insert(e.token).second) {
      throw Error(ErrorCode::InvalidParams, "duplicate token " + std::to_string(e.token));
    }
  }
  if (std::abs(total() - 1.0) > 1e-9) throw Error(ErrorCode::InvalidParams, "distribution does not sum to one");
}

std::vector<Entry> ranked(const ConditionalDistribution& dist) {
  std::vector<Entry> out = dist.entries();
  std::sort(out.begin(), out.end(), [](const Entry& a, const Entry& b) {
    if (a.prob != b.prob) return a.prob > b.prob;
    return a.token < b.token;
  });
  return out;
}

ConditionalDistribution without_token(const ConditionalDistribution& dist, TokenId token) {
  std::vector<Entry> kept;
  kept.reserve(dist.size());
  double mass = 0.0;
  for (const auto& e : dist.entries()) {
    if (e.token == token) continue;
    kept.push_back(e);
    mass += e.prob;
  }
  if (kept.empty() || !(mass > 0.0)) {
    throw Error(ErrorCode::InvalidParams, "no support left after removing token " + std::to_string(token));
  }
  for (auto& e : kept) e.prob /= mass;
  return ConditionalDistribution(std::move(kept));
}

}  // namespace stegbench::lm
