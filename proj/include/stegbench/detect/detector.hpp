#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "stegbench/features/features.hpp"
#include "stegbench/label.hpp"
#include "stegbench/metrics/metrics.hpp"

namespace stegbench::detect {

// Feature layout v1: token_count, mean_token_nll, z_score.
inline constexpr int kFeatureLayoutVersion = 1;
inline constexpr std::size_t kFeatureCount = 3;

std::vector<double> feature_vector(const features::SentenceFeatures& f, double z_score);

struct Sample {
  std::vector<double> x;
  Label label = Label::Cover;
};

struct TrainConfig {
  double learning_rate = 0.5;
  int epochs = 500;
  double l2 = 1e-3;
  std::uint64_t seed = 0;

  // Throws InvalidConfig.
  void validate() const;
};

struct Verdict {
  Label label = Label::Stego;
  double confidence = 0.5;  // sigmoid score; stego iff >= 0.5
};

// L2-regularized mean logistic loss over standardized inputs. Parameters are
// packed as [w_0 .. w_{d-1}, bias]; the bias is not regularized.
class LogisticObjective {
 public:
  LogisticObjective(std::vector<std::vector<double>> x, std::vector<double> y, double l2);

  double loss(std::span<const double> params) const;
  std::vector<double> gradient(std::span<const double> params) const;
  std::size_t dimension() const { return dim_; }

 private:
  std::vector<std::vector<double>> x_;
  std::vector<double> y_;
  double l2_;
  std::size_t dim_;
};

class FeatureDetector {
 public:
  FeatureDetector(std::vector<double> weights, double bias, std::vector<double> feature_mean,
                  std::vector<double> feature_scale);

  const std::vector<double>& weights() const { return weights_; }
  double bias() const { return bias_; }
  const std::vector<double>& feature_mean() const { return mean_; }
  const std::vector<double>& feature_scale() const { return scale_; }

  // Cover statistics used to compute the z_score feature at prediction time.
  const std::optional<features::CoverStats>& cover_stats() const { return cover_stats_; }
  void set_cover_stats(const features::CoverStats& stats) { cover_stats_ = stats; }

  // w . standardize(x) + b. Throws FeatureShapeMismatch.
  double logit(std::span<const double> x) const;

  void save(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;
  static FeatureDetector load(std::istream& in);
  static FeatureDetector load(const std::filesystem::path& path);

 private:
  std::vector<double> weights_;
  double bias_;
  std::vector<double> mean_;
  std::vector<double> scale_;
  std::optional<features::CoverStats> cover_stats_;
};

// Full-batch gradient descent. Samples are put in a canonical order first, so
// the result does not depend on the input order. Throws DegenerateTrainingSet
// when only one label is present and InsufficientData when empty.
FeatureDetector train_detector(std::vector<Sample> samples, const TrainConfig& config);

Verdict predict(const FeatureDetector& detector, std::span<const double> x);

// TS/FS/TN/FN tally; a feature detector never abstains, so US = UN = 0.
// Throws InsufficientData.
metrics::ConfusionCounts evaluate(const FeatureDetector& detector, std::span<const Sample> test_set);

}  // namespace stegbench::detect
