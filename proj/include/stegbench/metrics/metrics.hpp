#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "stegbench/label.hpp"

namespace stegbench::metrics {

// Six-way outcome of one detection. US/UN are answers that matched neither
// label string, split by the true label.
enum class Cell { TS, FS, US, TN, FN, UN };

Cell classify(Label truth, std::optional<Label> answer);

struct ConfusionCounts {
  std::uint64_t ts = 0;
  std::uint64_t fs = 0;
  std::uint64_t us = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;
  std::uint64_t un = 0;

  std::uint64_t total() const { return ts + fs + us + tn + fn + un; }
  void add(Cell cell);
  ConfusionCounts& operator+=(const ConfusionCounts& other);

  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

// (TS+TN) / total. Throws EmptyCounts.
double accuracy(const ConfusionCounts& c);
// TS / (TS+FS+US). Throws UndefinedMetric.
double precision(const ConfusionCounts& c);
// TS / (TS+FN). Throws UndefinedMetric.
double recall(const ConfusionCounts& c);
// 2TS / (2TS+FN+FS+US). Throws UndefinedMetric.
double f1(const ConfusionCounts& c);
// (1+b^2) P R / (b^2 P + R).
double f_beta(const ConfusionCounts& c, double beta);

struct MetricSummary {
  std::optional<double> accuracy;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
};

// Same four metrics with undefined values left empty instead of throwing.
MetricSummary summarize(const ConfusionCounts& c);

// 0.941 -> "94.10"; empty -> "—".
std::string percent(std::optional<double> value);

}  // namespace stegbench::metrics
