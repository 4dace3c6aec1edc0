#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "stegbench/lm/distribution.hpp"

namespace stegbench::features {

struct SentenceFeatures {
  std::size_t token_count = 0;
  double neg_log_prob = 0.0;  // nats, -sum ln p
  double ppl = 1.0;           // exp(mean_token_nll)
  double mean_token_nll = 0.0;
};

struct CoverStats {
  double mean_nlp = 0.0;
  double std_nlp = 0.0;  // population standard deviation
  std::size_t n = 0;
  bool degenerate = false;  // std_nlp == 0
};

struct DatasetStats {
  double mean_tokens = 0.0;
  double mean_ppl = 0.0;
  std::size_t n = 0;
};

// Throws EmptySentence.
SentenceFeatures extract_features(const lm::DistributionProvider& provider, std::span<const lm::TokenId> tokens);
SentenceFeatures features_from_nll(double neg_log_prob, std::size_t token_count);

// Throws InsufficientData for fewer than two covers.
CoverStats fit_cover_stats(std::span<const SentenceFeatures> covers);

// (neg_log_prob - mean) / std. Throws DegenerateStats when std is zero.
double normalize(const SentenceFeatures& features, const CoverStats& stats);

// Throws InsufficientData for an empty corpus.
DatasetStats dataset_stats(const lm::DistributionProvider& provider, const std::vector<std::vector<lm::TokenId>>& corpus);
DatasetStats summarize(std::span<const SentenceFeatures> records);

}  // namespace stegbench::features
