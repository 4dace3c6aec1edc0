#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "stegbench/lm/distribution.hpp"
#include "stegbench/lm/vocabulary.hpp"

namespace stegbench::lm {

struct NGramConfig {
  int order = 3;
  double smoothing_k = 0.1;
  int min_count = 1;
  bool lowercase = false;
};

struct ContextHash {
  std::size_t operator()(const std::vector<TokenId>& key) const noexcept;
};

// Continuation counts for one history.
struct ContextCounts {
  std::uint64_t total = 0;
  // Sorted by token id.
  std::vector<std::pair<TokenId, std::uint64_t>> next;
};

// Interpolated add-k n-gram model.
//
//   P(x | c) = sum_m lambda_m * (count_m(c_m, x) + k) / (count_m(c_m) + k * V')
//
// where c_m is the last m-1 tokens of the BOS-padded history, V' is the number
// of predictable tokens (everything except BOS) and lambda_m is proportional to
// count_m(c_m) over the orders whose history was observed in training. The
// unigram history is always observed, so the model never runs out of support.
class NGramModel : public DistributionProvider {
 public:
  using Table = std::unordered_map<std::vector<TokenId>, ContextCounts, ContextHash>;

  NGramModel(NGramConfig config, Vocabulary vocab, std::vector<Table> tables);

  ConditionalDistribution next(std::span<const TokenId> context) const override;
  std::size_t vocab_size() const override { return vocab_.size(); }

  const Vocabulary& vocab() const { return vocab_; }
  const NGramConfig& config() const { return config_; }
  int order() const { return config_.order; }

  // Whitespace tokenization with the model's case folding, mapped to ids.
  std::vector<TokenId> encode(std::string_view sentence) const;
  std::string decode(std::span<const TokenId> tokens) const;

  void save(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;
  static NGramModel load(std::istream& in);
  static NGramModel load(const std::filesystem::path& path);

  // Count tables indexed by order-1; table[0] holds the single empty history.
  const std::vector<Table>& tables() const { return tables_; }

 private:
  NGramConfig config_;
  Vocabulary vocab_;
  std::vector<Table> tables_;
  std::vector<double> unigram_;  // add-k unigram component, indexed by id - 1
};

// Throws TrainingDataEmpty for an empty corpus and InvalidConfig for order < 1,
// k <= 0 or min_count < 1.
NGramModel train_ngram(const std::vector<std::vector<std::string>>& corpus, const NGramConfig& config);

}  // namespace stegbench::lm
