#include "stegbench/prompt/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include "json.hpp"

#include "stegbench/error.hpp"
#include "stegbench/prompt/templates.hpp"
#include "stegbench/rng.hpp"

namespace stegbench::prompt {

using nlohmann::ordered_json;

InstructionRecord make_instruction(const LabeledSentence& sentence, int template_id) {
  InstructionRecord r;
  r.prompt = render(template_id, sentence.text);
  r.completion = std::string(label_string(template_id, sentence.label));
  r.true_label = sentence.label;
  r.source = sentence.source;
  r.algorithm = sentence.algorithm;
  r.id = sentence.id;
  return r;
}

SplitSizes split_sizes(std::size_t n) {
  SplitSizes s{n * 3 / 5, n / 5, n / 5};
  std::size_t left = n - s.train - s.valid - s.test;
  for (std::size_t* slot : {&s.train, &s.valid, &s.test}) {
    if (left == 0) break;
    ++*slot;
    --left;
  }
  return s;
}

SplitIndices stratified_split(std::span<const std::string> stratum_keys, std::uint64_t seed) {
  std::map<std::string, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < stratum_keys.size(); ++i) strata[stratum_keys[i]].push_back(i);

  struct Slot {
    std::size_t rank;     // position within the shuffled stratum
    std::size_t size;     // stratum size
    std::size_t stratum;  // key order
    std::size_t index;
  };
  std::vector<Slot> merged;
  merged.reserve(stratum_keys.size());
  std::size_t stratum_no = 0;
  for (auto& [key, members] : strata) {
    Rng rng(derive_seed(seed, key));
    for (std::size_t i = members.size(); i > 1; --i) {
      std::swap(members[i - 1], members[rng.below(i)]);
    }
    for (std::size_t r = 0; r < members.size(); ++r) merged.push_back({r, members.size(), stratum_no, members[r]});
    ++stratum_no;
  }
  // (2r + 1) / 2m compared exactly in integers.
  std::sort(merged.begin(), merged.end(), [](const Slot& a, const Slot& b) {
    const auto lhs = static_cast<unsigned __int128>(2 * a.rank + 1) * b.size;
    const auto rhs = static_cast<unsigned __int128>(2 * b.rank + 1) * a.size;
    if (lhs != rhs) return lhs < rhs;
    return a.stratum < b.stratum;
  });

  const SplitSizes sizes = split_sizes(merged.size());
  SplitIndices out;
  for (std::size_t i = 0; i < merged.size(); ++i) {
    auto& dest = i < sizes.train ? out.train : (i < sizes.train + sizes.valid ? out.valid : out.test);
    dest.push_back(merged[i].index);
  }
  return out;
}

std::string stratum_key(const LabeledSentence& s) {
  return std::string(to_string(s.label)) + "|" + s.source + "|" + s.algorithm;
}

DatasetSplits build_dataset(std::span<const LabeledSentence> records, int template_id, std::uint64_t split_seed) {
  get_template(template_id);
  const bool has_stego = std::any_of(records.begin(), records.end(), [](const auto& r) { return r.label == Label::Stego; });
  const bool has_cover = std::any_of(records.begin(), records.end(), [](const auto& r) { return r.label == Label::Cover; });
  if (!has_stego || !has_cover) throw Error(ErrorCode::DegenerateDataset, "dataset needs both stego and cover records");

  std::vector<std::string> keys;
  keys.reserve(records.size());
  for (const auto& r : records) keys.push_back(stratum_key(r));
  const auto idx = stratified_split(keys, split_seed);

  DatasetSplits out;
  for (auto i : idx.train) out.train.push_back(make_instruction(records[i], template_id));
  for (auto i : idx.valid) out.valid.push_back(make_instruction(records[i], template_id));
  for (auto i : idx.test) out.test.push_back(make_instruction(records[i], template_id));
  return out;
}

void write_records(const std::filesystem::path& path, std::span<const InstructionRecord> records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  for (const auto& r : records) {
    ordered_json j;
    j["prompt"] = r.prompt;
    j["completion"] = r.completion;
    j["true_label"] = std::string(to_string(r.true_label));
    j["source"] = r.source;
    j["algorithm"] = r.algorithm;
    j["id"] = r.id;
    out << j.dump() << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

std::vector<InstructionRecord> read_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::vector<InstructionRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      InstructionRecord r;
      r.prompt = j.at("prompt").get<std::string>();
      r.completion = j.at("completion").get<std::string>();
      r.true_label = parse_label(j.at("true_label").get<std::string>());
      r.source = j.at("source").get<std::string>();
      r.algorithm = j.at("algorithm").get<std::string>();
      r.id = j.at("id").get<std::string>();
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::FormatError, path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_dataset(const std::filesystem::path& dir, const DatasetSplits& splits) {
  std::filesystem::create_directories(dir);
  write_records(dir / "train.jsonl", splits.train);
  write_records(dir / "valid.jsonl", splits.valid);
  write_records(dir / "test.jsonl", splits.test);
}

std::vector<InferenceAnswer> read_answers(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::vector<InferenceAnswer> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      InferenceAnswer a;
      a.id = j.at("id").get<std::string>();
      a.answer = j.at("answer").get<std::string>();
      a.latency_ms = j.value("latency_ms", 0.0);
      out.push_back(std::move(a));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::FormatError, path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace stegbench::prompt
