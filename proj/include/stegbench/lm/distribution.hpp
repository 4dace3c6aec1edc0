#pragma once

#include <span>
#include <vector>

#include "stegbench/lm/vocabulary.hpp"

namespace stegbench::lm {

struct Entry {
  TokenId token;
  double prob;

  friend bool operator==(const Entry&, const Entry&) = default;
};

// A normalized next-token distribution. Entries are kept in the order the
// provider produced them; ranked() gives the codec ordering.
class ConditionalDistribution {
 public:
  ConditionalDistribution() = default;
  explicit ConditionalDistribution(std::vector<Entry> entries) : entries_(std::move(entries)) {}

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  // Probability of `token`, 0 when absent.
  double prob(TokenId token) const;
  double total() const;

  // Throws InvalidParams unless every prob > 0, ids are unique and the sum is
  // within 1e-9 of one.
  void validate() const;

  friend bool operator==(const ConditionalDistribution&, const ConditionalDistribution&) = default;

 private:
  std::vector<Entry> entries_;
};

// Probability descending, token id ascending. Shared by every codec so the
// encoder and decoder see the same candidate order.
std::vector<Entry> ranked(const ConditionalDistribution& dist);

// Drops `token` and rescales the rest to sum to one.
ConditionalDistribution without_token(const ConditionalDistribution& dist, TokenId token);

// Abstract next-token source. Implementations must be deterministic: the same
// context yields bit-identical probabilities on every call.
class DistributionProvider {
 public:
  virtual ~DistributionProvider() = default;

  virtual ConditionalDistribution next(std::span<const TokenId> context) const = 0;
  virtual std::size_t vocab_size() const = 0;
};

}  // namespace stegbench::lm
