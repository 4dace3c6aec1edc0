#include "stegbench/bench/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "stegbench/error.hpp"
#include "stegbench/prompt/templates.hpp"

namespace stegbench::bench {

using nlohmann::json;
using nlohmann::ordered_json;

std::size_t bucket_index(std::size_t token_count) { return std::min<std::size_t>(token_count / 10, kBucketCount - 1); }

std::string bucket_name(std::size_t index) {
  if (index == 0) return "<10";
  if (index >= kBucketCount - 1) return ">=70";
  return std::to_string(index * 10) + "-" + std::to_string(index * 10 + 9);
}

std::vector<BucketRow> length_bucket_report(std::span<const LengthVerdict> verdicts) {
  std::vector<BucketRow> rows(kBucketCount);
  for (std::size_t i = 0; i < kBucketCount; ++i) rows[i].bucket = bucket_name(i);
  for (const auto& v : verdicts) {
    auto& row = rows[bucket_index(v.token_count)];
    ++row.count;
    if (v.correct) ++row.correct;
  }
  for (auto& row : rows) {
    if (row.count > 0) row.accuracy = static_cast<double>(row.correct) / static_cast<double>(row.count);
  }
  return rows;
}

void error_export(std::span<const features::ScatterRecord> records, const std::filesystem::path& path) {
  features::export_scatter(records, path, features::ScatterFilter::ErrorsOnly);
}

std::vector<std::string> Report::matrix_rows() const {
  std::vector<std::string> out;
  for (const auto& c : cells) {
    if (std::find(out.begin(), out.end(), c.train) == out.end()) out.push_back(c.train);
  }
  return out;
}

std::vector<std::string> Report::matrix_columns() const {
  std::vector<std::string> out;
  for (const auto& c : cells) {
    if (std::find(out.begin(), out.end(), c.test) == out.end()) out.push_back(c.test);
  }
  return out;
}

const CellReport* Report::find(std::string_view train, std::string_view test) const {
  for (const auto& c : cells) {
    if (c.train == train && c.test == test) return &c;
  }
  return nullptr;
}

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

ordered_json counts_json(const metrics::ConfusionCounts& c) {
  ordered_json j;
  j["ts"] = c.ts;
  j["fs"] = c.fs;
  j["us"] = c.us;
  j["tn"] = c.tn;
  j["fn"] = c.fn;
  j["un"] = c.un;
  return j;
}

ordered_json metrics_json(const metrics::ConfusionCounts& c) {
  const auto m = metrics::summarize(c);
  ordered_json j;
  j["accuracy"] = metrics::percent(m.accuracy);
  j["precision"] = metrics::percent(m.precision);
  j["recall"] = metrics::percent(m.recall);
  j["f1"] = metrics::percent(m.f1);
  return j;
}

}  // namespace

std::string report_json(const Report& r) {
  ordered_json j;
  j["format"] = "stegbench-report 1";
  j["mode"] = r.mode;
  j["seed"] = r.seed;
  j["template_id"] = r.template_id;
  j["datasets"] = ordered_json::array();
  for (const auto& d : r.datasets) {
    ordered_json e;
    e["key"] = d.key;
    e["source"] = d.source;
    e["algorithm"] = d.algorithm;
    e["count"] = d.count;
    e["split"] = {d.train, d.valid, d.test};
    e["mean_tokens"] = fixed(d.mean_tokens, 4);
    e["mean_ppl"] = fixed(d.mean_ppl, 4);
    j["datasets"].push_back(e);
  }
  j["cells"] = ordered_json::array();
  for (const auto& c : r.cells) {
    ordered_json e;
    e["train"] = c.train;
    e["test"] = c.test;
    e["counts"] = counts_json(c.counts);
    e["metrics"] = metrics_json(c.counts);
    e["buckets"] = ordered_json::array();
    for (const auto& b : c.buckets) {
      ordered_json row;
      row["bucket"] = b.bucket;
      row["count"] = b.count;
      row["correct"] = b.correct;
      row["accuracy"] = metrics::percent(b.accuracy);
      e["buckets"].push_back(row);
    }
    e["errors_export"] = c.errors_export;
    j["cells"].push_back(e);
  }
  j["transfer_matrix"]["rows"] = r.matrix_rows();
  j["transfer_matrix"]["columns"] = r.matrix_columns();
  j["transfer_matrix"]["accuracy"] = ordered_json::array();
  for (const auto& row : r.matrix_rows()) {
    ordered_json line = ordered_json::array();
    for (const auto& col : r.matrix_columns()) {
      const auto* c = r.find(row, col);
      line.push_back(c ? metrics::percent(metrics::summarize(c->counts).accuracy) : metrics::percent(std::nullopt));
    }
    j["transfer_matrix"]["accuracy"].push_back(line);
  }
  j["validation"] = ordered_json::array();
  for (const auto& v : r.validation) {
    ordered_json e;
    e["detector"] = v.detector;
    e["counts"] = counts_json(v.counts);
    e["metrics"] = metrics_json(v.counts);
    j["validation"].push_back(e);
  }
  j["exports"] = r.exports;
  return j.dump(2) + "\n";
}

namespace {

std::string pad(std::string s, std::size_t width) {
  // Pad by code points so the em dash used for undefined metrics lines up.
  std::size_t cps = 0;
  for (unsigned char ch : s) cps += (ch & 0xC0) != 0x80;
  if (cps < width) s.append(width - cps, ' ');
  return s;
}

}  // namespace

std::string report_text(const Report& r) {
  std::ostringstream out;
  out << "mode " << r.mode << "  seed " << r.seed << "  template " << r.template_id << "\n\n";

  out << "Datasets\n";
  out << pad("key", 20) << pad("count", 8) << pad("train", 8) << pad("valid", 8) << pad("test", 8)
      << pad("tokens", 10) << "ppl\n";
  for (const auto& d : r.datasets) {
    out << pad(d.key, 20) << pad(std::to_string(d.count), 8) << pad(std::to_string(d.train), 8)
        << pad(std::to_string(d.valid), 8) << pad(std::to_string(d.test), 8) << pad(fixed(d.mean_tokens, 2), 10)
        << fixed(d.mean_ppl, 2) << "\n";
  }

  out << "\nResults (percent)\n";
  out << pad("train", 20) << pad("test", 20);
  for (const char* h : {"TS", "FS", "US", "TN", "FN", "UN"}) out << pad(h, 7);
  out << pad("Acc", 8) << pad("P", 8) << pad("R", 8) << "F1\n";
  for (const auto& c : r.cells) {
    const auto m = metrics::summarize(c.counts);
    out << pad(c.train, 20) << pad(c.test, 20);
    for (auto v : {c.counts.ts, c.counts.fs, c.counts.us, c.counts.tn, c.counts.fn, c.counts.un}) {
      out << pad(std::to_string(v), 7);
    }
    out << pad(metrics::percent(m.accuracy), 8) << pad(metrics::percent(m.precision), 8)
        << pad(metrics::percent(m.recall), 8) << metrics::percent(m.f1) << "\n";
  }

  const auto rows = r.matrix_rows();
  const auto cols = r.matrix_columns();
  out << "\nTransfer matrix (accuracy; rows train, columns test)\n" << pad("", 20);
  for (const auto& col : cols) out << pad(col, 16);
  out << "\n";
  for (const auto& row : rows) {
    out << pad(row, 20);
    for (const auto& col : cols) {
      const auto* c = r.find(row, col);
      out << pad(c ? metrics::percent(metrics::summarize(c->counts).accuracy) : metrics::percent(std::nullopt), 16);
    }
    out << "\n";
  }

  if (!r.validation.empty()) {
    out << "\nValidation split (held out, not used for training)\n";
    for (const auto& v : r.validation) {
      out << pad(v.detector, 20) << "acc " << metrics::percent(metrics::summarize(v.counts).accuracy) << "  n "
          << v.counts.total() << "\n";
    }
  }

  out << "\nAccuracy by sentence length\n" << pad("train", 20) << pad("test", 20);
  for (std::size_t i = 0; i < kBucketCount; ++i) out << pad(bucket_name(i), 10);
  out << "\n";
  for (const auto& c : r.cells) {
    out << pad(c.train, 20) << pad(c.test, 20);
    for (const auto& b : c.buckets) out << pad(metrics::percent(b.accuracy), 10);
    out << "\n";
  }
  return out.str();
}

namespace {

[[noreturn]] void mismatch(const std::string& what) { throw Error(ErrorCode::FormatError, "report: " + what); }

metrics::ConfusionCounts parse_counts(const json& j) {
  metrics::ConfusionCounts c;
  c.ts = j.at("ts").get<std::uint64_t>();
  c.fs = j.at("fs").get<std::uint64_t>();
  c.us = j.at("us").get<std::uint64_t>();
  c.tn = j.at("tn").get<std::uint64_t>();
  c.fn = j.at("fn").get<std::uint64_t>();
  c.un = j.at("un").get<std::uint64_t>();
  return c;
}

void verify_metrics(const json& stored, const metrics::ConfusionCounts& c, const std::string& where) {
  const auto expect = metrics_json(c);
  for (const auto& [name, value] : expect.items()) {
    if (stored.at(name).get<std::string>() != value.get<std::string>()) {
      mismatch(where + " " + name + " is " + stored.at(name).get<std::string>() + ", counts give " +
               value.get<std::string>());
    }
  }
}

}  // namespace

Report parse_report(const std::string& json_text) {
  Report r;
  try {
    const json j = json::parse(json_text);
    if (j.at("format").get<std::string>() != "stegbench-report 1") mismatch("unknown format");
    r.mode = j.at("mode").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.template_id = j.at("template_id").get<int>();
    for (const auto& e : j.at("datasets")) {
      DatasetReport d;
      d.key = e.at("key").get<std::string>();
      d.source = e.at("source").get<std::string>();
      d.algorithm = e.at("algorithm").get<std::string>();
      d.count = e.at("count").get<std::size_t>();
      const auto& split = e.at("split");
      d.train = split.at(0).get<std::size_t>();
      d.valid = split.at(1).get<std::size_t>();
      d.test = split.at(2).get<std::size_t>();
      d.mean_tokens = std::stod(e.at("mean_tokens").get<std::string>());
      d.mean_ppl = std::stod(e.at("mean_ppl").get<std::string>());
      r.datasets.push_back(std::move(d));
    }
    for (const auto& e : j.at("cells")) {
      CellReport c;
      c.train = e.at("train").get<std::string>();
      c.test = e.at("test").get<std::string>();
      c.counts = parse_counts(e.at("counts"));
      const std::string where = "cell " + c.train + "/" + c.test;
      verify_metrics(e.at("metrics"), c.counts, where);
      std::uint64_t bucket_total = 0;
      std::uint64_t bucket_correct = 0;
      for (const auto& b : e.at("buckets")) {
        BucketRow row;
        row.bucket = b.at("bucket").get<std::string>();
        row.count = b.at("count").get<std::uint64_t>();
        row.correct = b.at("correct").get<std::uint64_t>();
        if (row.correct > row.count) mismatch(where + " bucket " + row.bucket + " has correct > count");
        if (row.count > 0) row.accuracy = static_cast<double>(row.correct) / static_cast<double>(row.count);
        if (b.at("accuracy").get<std::string>() != metrics::percent(row.accuracy)) {
          mismatch(where + " bucket " + row.bucket + " accuracy does not match its counts");
        }
        bucket_total += row.count;
        bucket_correct += row.correct;
        c.buckets.push_back(std::move(row));
      }
      if (!c.buckets.empty() &&
          (bucket_total != c.counts.total() || bucket_correct != c.counts.ts + c.counts.tn)) {
        mismatch(where + " length buckets do not add up to the confusion counts");
      }
      c.errors_export = e.at("errors_export").get<std::string>();
      r.cells.push_back(std::move(c));
    }
    const auto& tm = j.at("transfer_matrix");
    const auto rows = r.matrix_rows();
    const auto cols = r.matrix_columns();
    if (tm.at("rows").get<std::vector<std::string>>() != rows ||
        tm.at("columns").get<std::vector<std::string>>() != cols) {
      mismatch("transfer matrix axes do not match the cells");
    }
    const auto& acc = tm.at("accuracy");
    if (acc.size() != rows.size()) mismatch("transfer matrix has the wrong number of rows");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (acc[i].size() != cols.size()) mismatch("transfer matrix row " + rows[i] + " has the wrong length");
      for (std::size_t k = 0; k < cols.size(); ++k) {
        const auto* c = r.find(rows[i], cols[k]);
        const std::string want =
            c ? metrics::percent(metrics::summarize(c->counts).accuracy) : metrics::percent(std::nullopt);
        if (acc[i][k].get<std::string>() != want) mismatch("transfer matrix entry " + rows[i] + "/" + cols[k]);
      }
    }
    for (const auto& e : j.at("validation")) {
      ValidationReport v;
      v.detector = e.at("detector").get<std::string>();
      v.counts = parse_counts(e.at("counts"));
      verify_metrics(e.at("metrics"), v.counts, "validation " + v.detector);
      r.validation.push_back(std::move(v));
    }
    r.exports = j.at("exports").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    mismatch(e.what());
  } catch (const std::invalid_argument&) {
    mismatch("malformed number");
  }
  return r;
}

Report load_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_report(ss.str());
}

metrics::ConfusionCounts score_answers(std::span<const prompt::InstructionRecord> records,
                                       std::span<const prompt::InferenceAnswer> answers, int template_id) {
  std::map<std::string, const prompt::InferenceAnswer*> by_id;
  for (const auto& a : answers) {
    if (!by_id.emplace(a.id, &a).second) throw Error(ErrorCode::FormatError, "duplicate answer for " + a.id);
  }
  metrics::ConfusionCounts counts;
  for (const auto& rec : records) {
    const auto it = by_id.find(rec.id);
    if (it == by_id.end()) throw Error(ErrorCode::FormatError, "no answer for record " + rec.id);
    counts.add(prompt::parse_answer(template_id, it->second->answer, rec.true_label).cell);
    by_id.erase(it);
  }
  if (!by_id.empty()) throw Error(ErrorCode::FormatError, "answer for unknown record " + by_id.begin()->first);
  return counts;
}

}  // namespace stegbench::bench
