#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "stegbench/codec/stego.hpp"
#include "stegbench/error.hpp"
#include "stegbench/features/features.hpp"
#include "stegbench/features/scatter.hpp"
#include "stegbench/lm/scoring.hpp"
#include "stegbench/rng.hpp"
#include "support.hpp"

using namespace stegbench;
using namespace stegbench::features;

using testsupport::code_of;

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path temp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "stegbench-test-features";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("features of hand-built sequences") {
  const testsupport::FnProvider halves(4, [](auto) { return lm::ConditionalDistribution({{1, 0.5}, {3, 0.5}}); });
  const lm::TokenId two[] = {3, 3};
  const auto f = extract_features(halves, two);
  CHECK(f.token_count == 2);
  CHECK(f.neg_log_prob == doctest::Approx(1.3863).epsilon(1e-4));
  CHECK(f.ppl == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(f.mean_token_nll == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  const testsupport::FnProvider certain(4, [](auto) { return lm::ConditionalDistribution({{3, 1.0}}); });
  const auto g = extract_features(certain, two);
  CHECK(g.neg_log_prob == 0.0);
  CHECK(g.ppl == 1.0);
  CHECK(code_of([&] { extract_features(certain, {}); }) == ErrorCode::EmptySentence);
}

TEST_CASE("feature invariants hold on model sentences") {
  const auto model = testsupport::toy_model();
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    std::vector<lm::TokenId> s(1 + rng.below(15));
    for (auto& t : s) t = static_cast<lm::TokenId>(1 + rng.below(model.vocab_size() - 1));
    const auto f = extract_features(model, s);
    CHECK(f.mean_token_nll == doctest::Approx(f.neg_log_prob / static_cast<double>(s.size())).epsilon(1e-12));
    CHECK(std::abs(f.ppl - std::exp(f.mean_token_nll)) <= 1e-9 * f.ppl);
    CHECK(f.neg_log_prob == lm::sequence_neg_log_prob(model, s));
    const auto again = extract_features(model, s);
    CHECK(again.neg_log_prob == f.neg_log_prob);
  }
}

TEST_CASE("cover statistics") {
  const std::vector<SentenceFeatures> two = {features_from_nll(1.0, 2), features_from_nll(3.0, 2)};
  const auto s = fit_cover_stats(two);
  CHECK(s.mean_nlp == 2.0);
  CHECK(s.std_nlp == 1.0);
  CHECK(s.n == 2);
  CHECK_FALSE(s.degenerate);

  const std::vector<SentenceFeatures> same = {features_from_nll(2.0, 2), features_from_nll(2.0, 3)};
  const auto d = fit_cover_stats(same);
  CHECK(d.std_nlp == 0.0);
  CHECK(d.degenerate);
  CHECK(code_of([&] { normalize(same[0], d); }) == ErrorCode::DegenerateStats);
  CHECK(code_of([&] { fit_cover_stats(std::vector<SentenceFeatures>{two[0]}); }) == ErrorCode::InsufficientData);

  CHECK(normalize(features_from_nll(2.0, 1), s) == 0.0);
  CHECK(normalize(features_from_nll(3.0, 1), s) == 1.0);

  std::vector<SentenceFeatures> many;
  Rng rng(2);
  for (int i = 0; i < 50; ++i) many.push_back(features_from_nll(10 * rng.uniform(), 5));
  auto shuffled = many;
  std::reverse(shuffled.begin(), shuffled.end());
  const auto a = fit_cover_stats(many);
  const auto b = fit_cover_stats(shuffled);
  CHECK(a.mean_nlp == doctest::Approx(b.mean_nlp).epsilon(1e-15));
  CHECK(a.std_nlp == doctest::Approx(b.std_nlp).epsilon(1e-15));
}

TEST_CASE("normalization is shift invariant") {
  Rng rng(3);
  std::vector<SentenceFeatures> covers, shifted;
  for (int i = 0; i < 40; ++i) {
    const double v = 20 * rng.uniform();
    covers.push_back(features_from_nll(v, 10));
    shifted.push_back(features_from_nll(v + 7.5, 10));
  }
  const auto a = fit_cover_stats(covers);
  const auto b = fit_cover_stats(shifted);
  for (int i = 0; i < 20; ++i) {
    const double x = 30 * rng.uniform();
    CHECK(normalize(features_from_nll(x, 10), a) ==
          doctest::Approx(normalize(features_from_nll(x + 7.5, 10), b)).epsilon(1e-9));
  }
}

TEST_CASE("a cover set normalized against itself is standard") {
  const auto model = testsupport::toy_model();
  std::vector<SentenceFeatures> covers;
  for (std::uint64_t s = 0; covers.size() < 300; ++s) {
    const auto c = codec::generate_cover(model, s, 40);
    if (!c.empty()) covers.push_back(extract_features(model, c));
  }
  const auto stats = fit_cover_stats(covers);
  double sum = 0.0, sq = 0.0;
  for (const auto& f : covers) sum += normalize(f, stats);
  const double mean = sum / static_cast<double>(covers.size());
  for (const auto& f : covers) sq += (normalize(f, stats) - mean) * (normalize(f, stats) - mean);
  CHECK(std::abs(mean) < 1e-9);
  CHECK(std::abs(std::sqrt(sq / static_cast<double>(covers.size())) - 1.0) < 1e-9);
}

TEST_CASE("dataset statistics") {
  const std::vector<SentenceFeatures> recs = {features_from_nll(2 * std::log(2.0), 2), features_from_nll(4 * std::log(4.0), 4)};
  const auto s = summarize(recs);
  CHECK(s.n == 2);
  CHECK(s.mean_tokens == 3.0);
  CHECK(s.mean_ppl == doctest::Approx(3.0).epsilon(1e-12));
  const auto one = summarize(std::span(recs).first(1));
  CHECK(one.mean_tokens == 2.0);
  CHECK(one.mean_ppl == doctest::Approx(2.0).epsilon(1e-12));

  // Mean of a concatenation is the count-weighted mean of the parts.
  Rng rng(4);
  std::vector<SentenceFeatures> a, b;
  for (int i = 0; i < 30; ++i) a.push_back(features_from_nll(5 * rng.uniform(), 1 + rng.below(9)));
  for (int i = 0; i < 70; ++i) b.push_back(features_from_nll(5 * rng.uniform(), 1 + rng.below(9)));
  auto ab = a;
  ab.insert(ab.end(), b.begin(), b.end());
  const auto sa = summarize(a), sb = summarize(b), sab = summarize(ab);
  CHECK(sab.mean_ppl == doctest::Approx((30 * sa.mean_ppl + 70 * sb.mean_ppl) / 100).epsilon(1e-12));
  std::reverse(ab.begin(), ab.end());
  CHECK(summarize(ab).mean_tokens == doctest::Approx(sab.mean_tokens).epsilon(1e-15));

  const auto model = testsupport::toy_model();
  CHECK(code_of([&] { dataset_stats(model, {}); }) == ErrorCode::InsufficientData);
  const std::vector<std::vector<lm::TokenId>> corpus = {model.encode("the cat sat"), model.encode("a dog")};
  const auto ds = dataset_stats(model, corpus);
  CHECK(ds.n == 2);
  CHECK(ds.mean_tokens == 2.5);
}

TEST_CASE("scatter export columns and error filter") {
  std::vector<ScatterRecord> recs;
  const Label labels[] = {Label::Stego, Label::Stego, Label::Cover, Label::Cover, Label::Cover};
  const Label verdicts[] = {Label::Stego, Label::Cover, Label::Cover, Label::Stego, Label::Cover};
  for (int i = 0; i < 5; ++i) {
    ScatterRecord r;
    r.id = "r" + std::to_string(i);
    r.label = labels[i];
    r.algorithm = labels[i] == Label::Stego ? "hc" : "natural";
    r.source = "movie";
    r.features = features_from_nll(2.0 + i, static_cast<std::size_t>(4 + i));
    r.z_score = 0.5 * i;
    r.verdict = verdicts[i];
    recs.push_back(r);
  }

  const auto all = temp_path("all.csv");
  export_scatter(std::span(recs).first(3), all);
  const auto text = read_file(all);
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
  CHECK(text.rfind("id,label,algorithm,source,token_count,neg_log_prob,ppl,z_score,detector_verdict\n", 0) == 0);
  CHECK(text.find("r0,stego,hc,movie,4,2.000000,1.648721,0.000000,stego\n") != std::string::npos);

  const auto errors = temp_path("errors.csv");
  export_scatter(recs, errors, ScatterFilter::ErrorsOnly);
  const auto err_text = read_file(errors);
  CHECK(err_text ==
        "id,label,algorithm,source,token_count,neg_log_prob,ppl,z_score,detector_verdict,error_kind\n"
        "r1,stego,hc,movie,5,3.000000,1.822119,0.500000,cover,non_detected\n"
        "r3,cover,natural,movie,7,5.000000,2.042727,1.500000,stego,incorrectly_detected\n");

  ScatterRecord bare;
  bare.id = "x";
  bare.features = features_from_nll(1.0, 1);
  CHECK(scatter_row(bare, ScatterFilter::All) == "x,cover,,,1,1.000000,2.718282,,");
  CHECK(code_of([&] { export_scatter(recs, "/nonexistent-dir/x.csv"); }) == ErrorCode::IoError);
}
