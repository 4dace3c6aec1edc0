#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stegbench/features/scatter.hpp"
#include "stegbench/metrics/metrics.hpp"
#include "stegbench/prompt/dataset.hpp"

namespace stegbench::bench {

// Length buckets: <10, 10-19, ..., 60-69, >=70. A sentence of n tokens lands
// in bucket min(n / 10, 7).
inline constexpr std::size_t kBucketCount = 8;
std::size_t bucket_index(std::size_t token_count);
std::string bucket_name(std::size_t index);

struct LengthVerdict {
  std::size_t token_count = 0;
  bool correct = false;
};

struct BucketRow {
  std::string bucket;
  std::uint64_t count = 0;
  std::uint64_t correct = 0;
  std::optional<double> accuracy;  // empty for an empty bucket

  friend bool operator==(const BucketRow&, const BucketRow&) = default;
};

// Always returns all eight buckets in order.
std::vector<BucketRow> length_bucket_report(std::span<const LengthVerdict> verdicts);

// Writes the misclassified records of `records` (verdict != label) as a
// scatter file with the error_kind column.
void error_export(std::span<const features::ScatterRecord> records, const std::filesystem::path& path);

struct CellReport {
  std::string train;  // detector name: a dataset key, or "general"
  std::string test;   // dataset key
  metrics::ConfusionCounts counts;
  std::vector<BucketRow> buckets;
  std::string errors_export;  // path relative to the run directory

  friend bool operator==(const CellReport&, const CellReport&) = default;
};

struct ValidationReport {
  std::string detector;
  metrics::ConfusionCounts counts;

  friend bool operator==(const ValidationReport&, const ValidationReport&) = default;
};

struct DatasetReport {
  std::string key;
  std::string source;
  std::string algorithm;
  std::size_t count = 0;
  std::size_t train = 0;
  std::size_t valid = 0;
  std::size_t test = 0;
  double mean_tokens = 0.0;
  double mean_ppl = 0.0;

  friend bool operator==(const DatasetReport&, const DatasetReport&) = default;
};

struct Report {
  std::string mode;
  std::uint64_t seed = 0;
  int template_id = 2;
  std::vector<DatasetReport> datasets;
  std::vector<CellReport> cells;
  std::vector<ValidationReport> validation;
  std::vector<std::string> exports;  // relative paths

  // Detector names in first-seen order, and test keys likewise; the transfer
  // matrix is rows x columns of cell accuracies.
  std::vector<std::string> matrix_rows() const;
  std::vector<std::string> matrix_columns() const;
  const CellReport* find(std::string_view train, std::string_view test) const;
};

// JSON text. Metric values are stored as two-decimal percent strings next to
// the counts they come from.
std::string report_json(const Report& report);
// Human-readable tables.
std::string report_text(const Report& report);

// Parses a report and recomputes every stored metric and bucket accuracy from
// its counts. Throws FormatError on any mismatch or malformed input.
Report parse_report(const std::string& json_text);
Report load_report(const std::filesystem::path& path);

// Scores generated answers against prompt records with the template's label
// parser. Every record needs exactly one answer; answers for unknown ids are
// rejected. Throws FormatError.
metrics::ConfusionCounts score_answers(std::span<const prompt::InstructionRecord> records,
                                       std::span<const prompt::InferenceAnswer> answers, int template_id);

}  // namespace stegbench::bench
