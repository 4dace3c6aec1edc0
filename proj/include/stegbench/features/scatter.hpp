#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>

#include "stegbench/features/features.hpp"
#include "stegbench/label.hpp"

namespace stegbench::features {

struct ScatterRecord {
  std::string id;
  Label label = Label::Cover;
  std::string algorithm;
  std::string source;
  SentenceFeatures features;
  std::optional<double> z_score;
  std::optional<Label> verdict;
};

enum class ScatterFilter {
  All,
  // Only rows whose verdict differs from the label; adds an error_kind
  // column ("non_detected" for stego->cover, "incorrectly_detected" for
  // cover->stego).
  ErrorsOnly,
};

// Comma-separated, one header row. Columns, in order:
//   id,label,algorithm,source,token_count,neg_log_prob,ppl,z_score,detector_verdict[,error_kind]
// Reals are printed with six decimals; missing z-scores and verdicts are
// empty fields. Throws IoError.
void export_scatter(std::span<const ScatterRecord> records, const std::filesystem::path& path,
                    ScatterFilter filter = ScatterFilter::All);

std::string scatter_header(ScatterFilter filter);
std::string scatter_row(const ScatterRecord& record, ScatterFilter filter);
bool is_error(const ScatterRecord& record);

}  // namespace stegbench::features
