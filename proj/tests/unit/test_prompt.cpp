#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "stegbench/prompt/dataset.hpp"
#include "stegbench/prompt/templates.hpp"
#include "support.hpp"

using namespace stegbench;
using namespace stegbench::prompt;
using metrics::Cell;
using testsupport::code_of;

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<LabeledSentence> balanced(std::size_t n) {
  std::vector<LabeledSentence> out;
  for (std::size_t i = 0; i < n; ++i) {
    const bool stego = i % 2 == 0;
    out.push_back({"s" + std::to_string(i), "sentence number " + std::to_string(i), stego ? Label::Stego : Label::Cover,
                   "movie", stego ? "ac" : "natural"});
  }
  return out;
}

}  // namespace

TEST_CASE("templates match the golden files") {
  for (int id = 1; id <= kTemplateCount; ++id) {
    const std::filesystem::path dir = STEGBENCH_GOLDEN_DIR;
    const std::string stem = "prompt_" + std::to_string(id) + "_";
    CHECK(render(id, "hello world") == read_file(dir / (stem + "infer.txt")));
    CHECK(render(id, "hello world", Label::Stego) == read_file(dir / (stem + "stego.txt")));
    CHECK(render(id, "hello world", Label::Cover) == read_file(dir / (stem + "cover.txt")));
  }
}

TEST_CASE("rendering rules") {
  CHECK(render(1, "hello world") ==
        "### Text: hello world\n### Question: Is the above text steganographic or non-steganographic?\n### Answer:");
  CHECK(render(4, "hello world", Label::Stego) == "### hello world\n### steganographic");
  CHECK(render(2, "a ### b") == "### Text: a ### b\n### Question: Is the above text steganographic?\n### Answer:");
  for (int id = 1; id <= kTemplateCount; ++id) {
    for (Label l : {Label::Stego, Label::Cover}) {
      const auto full = render(id, "some text", l);
      const auto suffix = " " + std::string(label_string(id, l));
      REQUIRE(full.size() > suffix.size());
      CHECK(full.substr(0, full.size() - suffix.size()) == render(id, "some text"));
    }
    CHECK(label_string(id, Label::Stego) != label_string(id, Label::Cover));
  }
  CHECK(code_of([] { render(0, "x"); }) == ErrorCode::InvalidTemplate);
  CHECK(code_of([] { render(9, "x"); }) == ErrorCode::InvalidTemplate);
  CHECK(code_of([] { render(1, "   "); }) == ErrorCode::EmptySentence);
}

TEST_CASE("answer parsing") {
  auto check = [](int id, const char* text, Label truth, ParsedLabel value, Cell cell) {
    const auto r = parse_answer(id, text, truth);
    CHECK_MESSAGE(r.value == value, id, " '", text, "'");
    CHECK_MESSAGE(r.cell == cell, id, " '", text, "'");
  };
  check(1, "Non-steganographic", Label::Cover, ParsedLabel::Cover, Cell::TN);
  check(1, "steganographic.", Label::Cover, ParsedLabel::Stego, Cell::FS);
  check(1, "  STEGANOGRAPHIC!\n", Label::Stego, ParsedLabel::Stego, Cell::TS);
  check(1, "non steganographic", Label::Cover, ParsedLabel::Unknown, Cell::UN);
  check(2, "maybe", Label::Stego, ParsedLabel::Unknown, Cell::US);
  check(2, "No", Label::Stego, ParsedLabel::Cover, Cell::FN);
  check(2, "yes, it is", Label::Stego, ParsedLabel::Unknown, Cell::US);
  check(5, "1", Label::Stego, ParsedLabel::Stego, Cell::TS);
  check(8, "0.", Label::Cover, ParsedLabel::Cover, Cell::TN);
  check(7, "Stega", Label::Cover, ParsedLabel::Stego, Cell::FS);
  check(7, "", Label::Cover, ParsedLabel::Unknown, Cell::UN);

  for (int id = 1; id <= kTemplateCount; ++id) {
    for (Label l : {Label::Stego, Label::Cover}) {
      for (Label truth : {Label::Stego, Label::Cover}) {
        const auto r = parse_answer(id, label_string(id, l), truth);
        CHECK(r.value == (l == Label::Stego ? ParsedLabel::Stego : ParsedLabel::Cover));
        CHECK(r.cell == metrics::classify(truth, l));
      }
    }
  }
}

TEST_CASE("split sizes") {
  CHECK(split_sizes(5).train == 3);
  CHECK(split_sizes(5).valid == 1);
  CHECK(split_sizes(5).test == 1);
  const auto s7 = split_sizes(7);
  CHECK((s7.train == 5 && s7.valid == 1 && s7.test == 1));
  const auto s8 = split_sizes(8);
  CHECK((s8.train == 5 && s8.valid == 2 && s8.test == 1));
  const auto big = split_sizes(20000);
  CHECK((big.train == 12000 && big.valid == 4000 && big.test == 4000));
  for (std::size_t n = 0; n < 300; ++n) {
    const auto s = split_sizes(n);
    CHECK(s.train + s.valid + s.test == n);
  }
}

TEST_CASE("stratified split partitions and balances") {
  const auto recs = balanced(20000);
  std::vector<std::string> keys;
  for (const auto& r : recs) keys.push_back(stratum_key(r));
  const auto split = stratified_split(keys, 3);
  CHECK(split.train.size() == 12000);
  CHECK(split.valid.size() == 4000);
  CHECK(split.test.size() == 4000);
  std::set<std::size_t> seen;
  for (const auto* part : {&split.train, &split.valid, &split.test}) {
    std::size_t stego = 0;
    for (auto i : *part) {
      CHECK(seen.insert(i).second);
      stego += recs[i].label == Label::Stego;
    }
    CHECK(std::abs(static_cast<long>(2 * stego) - static_cast<long>(part->size())) <= 2);
  }
  CHECK(seen.size() == recs.size());

  const auto five = balanced(5);
  const auto ds = build_dataset(five, 2, 1);
  CHECK(ds.train.size() == 3);
  CHECK(ds.valid.size() == 1);
  CHECK(ds.test.size() == 1);
}

TEST_CASE("dataset building and record files") {
  const auto recs = balanced(40);
  const auto a = build_dataset(recs, 2, 11);
  const auto b = build_dataset(recs, 2, 11);
  CHECK(a.train == b.train);
  CHECK(a.test == b.test);
  for (const auto& r : a.train) CHECK(r.completion == label_string(2, r.true_label));

  const auto dir = std::filesystem::temp_directory_path() / "stegbench-test-prompt";
  std::filesystem::remove_all(dir);
  write_dataset(dir / "one", a);
  write_dataset(dir / "two", b);
  for (const char* f : {"train.jsonl", "valid.jsonl", "test.jsonl"}) {
    CHECK(read_file(dir / "one" / f) == read_file(dir / "two" / f));
  }
  CHECK(read_records(dir / "one" / "train.jsonl") == a.train);
  const auto first_line = read_file(dir / "one" / "test.jsonl").substr(0, 12);
  CHECK(first_line == "{\"prompt\":\"#");

  std::vector<LabeledSentence> covers_only = {recs[1], recs[3]};
  CHECK(code_of([&] { build_dataset(covers_only, 2, 0); }) == ErrorCode::DegenerateDataset);

  std::ofstream(dir / "bad.jsonl") << "{\"prompt\": 1}\n";
  CHECK(code_of([&] { read_records(dir / "bad.jsonl"); }) == ErrorCode::FormatError);

  std::ofstream(dir / "answers.jsonl") << "{\"id\":\"s1\",\"answer\":\"yes\",\"latency_ms\":12.5}\n\n"
                                       << "{\"id\":\"s2\",\"answer\":\"no\"}\n";
  const auto answers = read_answers(dir / "answers.jsonl");
  REQUIRE(answers.size() == 2);
  CHECK(answers[0].latency_ms == 12.5);
  CHECK(answers[1].answer == "no");
}
