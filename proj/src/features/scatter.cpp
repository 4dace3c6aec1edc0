#include "stegbench/features/scatter.hpp"

#include <cstdio>
#include <fstream>

#include "stegbench/error.hpp"

namespace stegbench::features {

namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

bool is_error(const ScatterRecord& record) { return record.verdict && *record.verdict != record.label; }

std::string scatter_header(ScatterFilter filter) {
  std::string h = "id,label,algorithm,source,token_count,neg_log_prob,ppl,z_score,detector_verdict";
  if (filter == ScatterFilter::ErrorsOnly) h += ",error_kind";
  return h;
}

std::string scatter_row(const ScatterRecord& r, ScatterFilter filter) {
  std::string row = csv_field(r.id);
  row += ',';
  row += to_string(r.label);
  row += ',' + csv_field(r.algorithm) + ',' + csv_field(r.source);
  row += ',' + std::to_string(r.features.token_count);
  row += ',' + fixed6(r.features.neg_log_prob);
  row += ',' + fixed6(r.features.ppl);
  row += ',' + (r.z_score ? fixed6(*r.z_score) : std::string());
  row += ',';
  if (r.verdict) row += to_string(*r.verdict);
  if (filter == ScatterFilter::ErrorsOnly) {
    row += ',';
    if (is_error(r)) row += r.label == Label::Stego ? "non_detected" : "incorrectly_detected";
  }
  return row;
}

void export_scatter(std::span<const ScatterRecord> records, const std::filesystem::path& path, ScatterFilter filter) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << scatter_header(filter) << '\n';
  for (const auto& r : records) {
    if (filter == ScatterFilter::ErrorsOnly && !is_error(r)) continue;
    out << scatter_row(r, filter) << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace stegbench::features
