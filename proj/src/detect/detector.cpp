#include "stegbench/detect/detector.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "stegbench/error.hpp"
#include "stegbench/rng.hpp"

namespace stegbench::detect {

namespace {

constexpr std::string_view kMagic = "stegbench-detector";
constexpr std::string_view kLayoutNames = "token_count,mean_token_nll,z_score";

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + e^z) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

std::string hex(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

std::vector<double> parse_reals(const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0') throw Error(ErrorCode::FormatError, "bad real '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

std::string field(std::istream& in, std::string_view key) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::FormatError, "detector file ends early");
  const auto sp = line.find(' ');
  if (std::string_view(line).substr(0, sp) != key) {
    throw Error(ErrorCode::FormatError, "expected '" + std::string(key) + "', got '" + line + "'");
  }
  return sp == std::string::npos ? std::string() : line.substr(sp + 1);
}

}  // namespace

std::vector<double> feature_vector(const features::SentenceFeatures& f, double z_score) {
  return {static_cast<double>(f.token_count), f.mean_token_nll, z_score};
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw Error(ErrorCode::InvalidConfig, "learning_rate must be > 0");
  if (epochs < 1) throw Error(ErrorCode::InvalidConfig, "epochs must be >= 1");
  if (!(l2 >= 0.0)) throw Error(ErrorCode::InvalidConfig, "l2 must be >= 0");
}

LogisticObjective::LogisticObjective(std::vector<std::vector<double>> x, std::vector<double> y, double l2)
    : x_(std::move(x)), y_(std::move(y)), l2_(l2), dim_(x_.empty() ? 0 : x_.front().size()) {
  if (x_.size() != y_.size() || x_.empty()) throw Error(ErrorCode::InsufficientData, "objective needs samples");
}

double LogisticObjective::loss(std::span<const double> params) const {
  double total = 0.0;
  for (std::size_t i = 0; i < x_.size(); ++i) {
    double z = params[dim_];
    for (std::size_t j = 0; j < dim_; ++j) z += params[j] * x_[i][j];
    total += softplus(z) - y_[i] * z;
  }
  double reg = 0.0;
  for (std::size_t j = 0; j < dim_; ++j) reg += params[j] * params[j];
  return total / static_cast<double>(x_.size()) + 0.5 * l2_ * reg;
}

std::vector<double> LogisticObjective::gradient(std::span<const double> params) const {
  std::vector<double> g(dim_ + 1, 0.0);
  for (std::size_t i = 0; i < x_.size(); ++i) {
    double z = params[dim_];
    for (std::size_t j = 0; j < dim_; ++j) z += params[j] * x_[i][j];
    const double residual = sigmoid(z) - y_[i];
    for (std::size_t j = 0; j < dim_; ++j) g[j] += residual * x_[i][j];
    g[dim_] += residual;
  }
  const auto n = static_cast<double>(x_.size());
  for (auto& v : g) v /= n;
  for (std::size_t j = 0; j < dim_; ++j) g[j] += l2_ * params[j];
  return g;
}

FeatureDetector::FeatureDetector(std::vector<double> weights, double bias, std::vector<double> feature_mean,
                                 std::vector<double> feature_scale)
    : weights_(std::move(weights)), bias_(bias), mean_(std::move(feature_mean)), scale_(std::move(feature_scale)) {
  if (weights_.size() != kFeatureCount || mean_.size() != kFeatureCount || scale_.size() != kFeatureCount) {
    throw Error(ErrorCode::FeatureShapeMismatch, "detector vectors must have " + std::to_string(kFeatureCount) + " entries");
  }
}

double FeatureDetector::logit(std::span<const double> x) const {
  if (x.size() != weights_.size()) {
    throw Error(ErrorCode::FeatureShapeMismatch, "expected " + std::to_string(weights_.size()) + " features, got " +
                                                     std::to_string(x.size()));
  }
  double z = bias_;
  for (std::size_t j = 0; j < x.size(); ++j) z += weights_[j] * (x[j] - mean_[j]) / scale_[j];
  return z;
}

void FeatureDetector::save(std::ostream& out) const {
  auto line = [&out](std::string_view key, const std::vector<double>& values) {
    out << key;
    for (double v : values) out << ' ' << hex(v);
    out << '\n';
  };
  out << kMagic << ' ' << kFeatureLayoutVersion << '\n';
  out << "layout " << kLayoutNames << '\n';
  line("weights", weights_);
  line("bias", {bias_});
  line("feature_mean", mean_);
  line("feature_scale", scale_);
  if (cover_stats_) {
    out << "cover_stats " << hex(cover_stats_->mean_nlp) << ' ' << hex(cover_stats_->std_nlp) << ' '
        << cover_stats_->n << '\n';
  } else {
    out << "cover_stats none\n";
  }
}

void FeatureDetector::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  save(out);
}

FeatureDetector FeatureDetector::load(std::istream& in) {
  std::string header;
  std::getline(in, header);
  if (header != std::string(kMagic) + " " + std::to_string(kFeatureLayoutVersion)) {
    throw Error(ErrorCode::FormatError, "not a stegbench detector (layout v1)");
  }
  if (field(in, "layout") != kLayoutNames) throw Error(ErrorCode::FeatureShapeMismatch, "unexpected feature layout");
  auto weights = parse_reals(field(in, "weights"));
  auto bias = parse_reals(field(in, "bias"));
  auto mean = parse_reals(field(in, "feature_mean"));
  auto scale = parse_reals(field(in, "feature_scale"));
  if (bias.size() != 1) throw Error(ErrorCode::FormatError, "bias must be a single value");
  FeatureDetector det(std::move(weights), bias[0], std::move(mean), std::move(scale));
  const std::string cs = field(in, "cover_stats");
  if (cs != "none") {
    std::istringstream s(cs);
    std::string m, sd;
    std::size_t n = 0;
    s >> m >> sd >> n;
    const auto vals = parse_reals(m + " " + sd);
    if (vals.size() != 2) throw Error(ErrorCode::FormatError, "bad cover_stats line");
    det.set_cover_stats(features::CoverStats{vals[0], vals[1], n, vals[1] == 0.0});
  }
  return det;
}

FeatureDetector FeatureDetector::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return load(in);
}

FeatureDetector train_detector(std::vector<Sample> samples, const TrainConfig& config) {
  config.validate();
  if (samples.empty()) throw Error(ErrorCode::InsufficientData, "no training samples");
  for (const auto& s : samples) {
    if (s.x.size() != kFeatureCount) throw Error(ErrorCode::FeatureShapeMismatch, "training sample has wrong layout");
  }
  const bool has_stego = std::any_of(samples.begin(), samples.end(), [](const Sample& s) { return s.label == Label::Stego; });
  const bool has_cover = std::any_of(samples.begin(), samples.end(), [](const Sample& s) { return s.label == Label::Cover; });
  if (!has_stego || !has_cover) throw Error(ErrorCode::DegenerateTrainingSet, "training data has a single class");

  std::sort(samples.begin(), samples.end(), [](const Sample& a, const Sample& b) {
    if (a.x != b.x) return a.x < b.x;
    return a.label < b.label;
  });

  const std::size_t d = kFeatureCount;
  const auto n = static_cast<double>(samples.size());
  std::vector<double> mean(d, 0.0), scale(d, 0.0);
  for (const auto& s : samples) {
    for (std::size_t j = 0; j < d; ++j) mean[j] += s.x[j];
  }
  for (auto& m : mean) m /= n;
  for (const auto& s : samples) {
    for (std::size_t j = 0; j < d; ++j) scale[j] += (s.x[j] - mean[j]) * (s.x[j] - mean[j]);
  }
  for (auto& v : scale) {
    v = std::sqrt(v / n);
    if (!(v > 0.0)) v = 1.0;
  }

  std::vector<std::vector<double>> xs;
  std::vector<double> ys;
  xs.reserve(samples.size());
  for (const auto& s : samples) {
    std::vector<double> row(d);
    for (std::size_t j = 0; j < d; ++j) row[j] = (s.x[j] - mean[j]) / scale[j];
    xs.push_back(std::move(row));
    ys.push_back(s.label == Label::Stego ? 1.0 : 0.0);
  }
  const LogisticObjective objective(std::move(xs), std::move(ys), config.l2);

  Rng rng(config.seed);
  std::vector<double> params(d + 1, 0.0);
  for (std::size_t j = 0; j < d; ++j) params[j] = (rng.uniform() - 0.5) * 0.02;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const auto g = objective.gradient(params);
    for (std::size_t j = 0; j <= d; ++j) params[j] -= config.learning_rate * g[j];
  }
  const double bias = params[d];
  params.pop_back();
  return FeatureDetector(std::move(params), bias, std::move(mean), std::move(scale));
}

Verdict predict(const FeatureDetector& detector, std::span<const double> x) {
  Verdict v;
  v.confidence = sigmoid(detector.logit(x));
  v.label = v.confidence >= 0.5 ? Label::Stego : Label::Cover;
  return v;
}

metrics::ConfusionCounts evaluate(const FeatureDetector& detector, std::span<const Sample> test_set) {
  if (test_set.empty()) throw Error(ErrorCode::InsufficientData, "empty test set");
  metrics::ConfusionCounts counts;
  for (const auto& s : test_set) counts.add(metrics::classify(s.label, predict(detector, s.x).label));
  return counts;
}

}  // namespace stegbench::detect
