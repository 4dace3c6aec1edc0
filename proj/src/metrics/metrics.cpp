#include "stegbench/metrics/metrics.hpp"

#include <cmath>
#include <cstdio>

#include "stegbench/error.hpp"

namespace stegbench::metrics {

Cell classify(Label truth, std::optional<Label> answer) {
  if (!answer) return truth == Label::Stego ? Cell::US : Cell::UN;
  if (*answer == Label::Stego) return truth == Label::Stego ? Cell::TS : Cell::FS;
  return truth == Label::Cover ? Cell::TN : Cell::FN;
}

void ConfusionCounts::add(Cell cell) {
  switch (cell) {
    case Cell::TS: ++ts; break;
    case Cell::FS: ++fs; break;
    case Cell::US: ++us; break;
    case Cell::TN: ++tn; break;
    case Cell::FN: ++fn; break;
    case Cell::UN: ++un; break;
  }
}

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& o) {
  ts += o.ts;
  fs += o.fs;
  us += o.us;
  tn += o.tn;
  fn += o.fn;
  un += o.un;
  return *this;
}

namespace {

double ratio(std::uint64_t num, std::uint64_t den, const char* name) {
  if (den == 0) throw Error(ErrorCode::UndefinedMetric, std::string(name) + " has a zero denominator");
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

double accuracy(const ConfusionCounts& c) {
  if (c.total() == 0) throw Error(ErrorCode::EmptyCounts, "no outcomes counted");
  return static_cast<double>(c.ts + c.tn) / static_cast<double>(c.total());
}

double precision(const ConfusionCounts& c) { return ratio(c.ts, c.ts + c.fs + c.us, "precision"); }

double recall(const ConfusionCounts& c) { return ratio(c.ts, c.ts + c.fn, "recall"); }

double f1(const ConfusionCounts& c) { return ratio(2 * c.ts, 2 * c.ts + c.fn + c.fs + c.us, "F1"); }

double f_beta(const ConfusionCounts& c, double beta) {
  const double p = precision(c);
  const double r = recall(c);
  const double b2 = beta * beta;
  if (b2 * p + r == 0.0) throw Error(ErrorCode::UndefinedMetric, "F-beta with zero precision and recall");
  return (1.0 + b2) * p * r / (b2 * p + r);
}

MetricSummary summarize(const ConfusionCounts& c) {
  MetricSummary s;
  if (c.total() > 0) s.accuracy = accuracy(c);
  if (c.ts + c.fs + c.us > 0) s.precision = precision(c);
  if (c.ts + c.fn > 0) s.recall = recall(c);
  if (2 * c.ts + c.fn + c.fs + c.us > 0) s.f1 = f1(c);
  return s;
}

std::string percent(std::optional<double> value) {
  if (!value) return "—";
  char buf[32];
  const double scaled = std::round(*value * 10000.0) / 100.0;
  std::snprintf(buf, sizeof buf, "%.2f", scaled);
  return buf;
}

}  // namespace stegbench::metrics
