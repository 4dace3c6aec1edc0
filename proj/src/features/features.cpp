#include "stegbench/features/features.hpp"

#include <cmath>

#include "stegbench/error.hpp"
#include "stegbench/lm/scoring.hpp"

namespace stegbench::features {

SentenceFeatures features_from_nll(double neg_log_prob, std::size_t token_count) {
  if (token_count == 0) throw Error(ErrorCode::EmptySentence, "sentence has no tokens");
  SentenceFeatures f;
  f.token_count = token_count;
  f.neg_log_prob = neg_log_prob;
  f.mean_token_nll = neg_log_prob / static_cast<double>(token_count);
  f.ppl = lm::perplexity_from_nll(neg_log_prob, token_count);
  return f;
}

SentenceFeatures extract_features(const lm::DistributionProvider& provider, std::span<const lm::TokenId> tokens) {
  return features_from_nll(lm::sequence_neg_log_prob(provider, tokens), tokens.size());
}

CoverStats fit_cover_stats(std::span<const SentenceFeatures> covers) {
  if (covers.size() < 2) throw Error(ErrorCode::InsufficientData, "need at least two covers");
  const auto n = static_cast<double>(covers.size());
  double sum = 0.0;
  for (const auto& c : covers) sum += c.neg_log_prob;
  const double mean = sum / n;
  double sq = 0.0;
  for (const auto& c : covers) sq += (c.neg_log_prob - mean) * (c.neg_log_prob - mean);
  CoverStats stats;
  stats.mean_nlp = mean;
  stats.std_nlp = std::sqrt(sq / n);
  stats.n = covers.size();
  stats.degenerate = stats.std_nlp == 0.0;
  return stats;
}

double normalize(const SentenceFeatures& features, const CoverStats& stats) {
  if (stats.degenerate || !(stats.std_nlp > 0.0)) {
    throw Error(ErrorCode::DegenerateStats, "cover standard deviation is zero");
  }
  return (features.neg_log_prob - stats.mean_nlp) / stats.std_nlp;
}

DatasetStats summarize(std::span<const SentenceFeatures> records) {
  if (records.empty()) throw Error(ErrorCode::InsufficientData, "no records to summarize");
  double tokens = 0.0;
  double ppl = 0.0;
  for (const auto& r : records) {
    tokens += static_cast<double>(r.token_count);
    ppl += r.ppl;
  }
  const auto n = static_cast<double>(records.size());
  return DatasetStats{tokens / n, ppl / n, records.size()};
}

DatasetStats dataset_stats(const lm::DistributionProvider& provider, const std::vector<std::vector<lm::TokenId>>& corpus) {
  if (corpus.empty()) throw Error(ErrorCode::InsufficientData, "empty corpus");
  std::vector<SentenceFeatures> feats;
  feats.reserve(corpus.size());
  for (const auto& s : corpus) feats.push_back(extract_features(provider, s));
  return summarize(feats);
}

}  // namespace stegbench::features
