#include <cmath>
#include <cstring>
#include <limits>
#include <filesystem>
#include <map>
#include <sstream>

#include "doctest.h"
#include "stegbench/error.hpp"
#include "stegbench/lm/scoring.hpp"
#include "stegbench/rng.hpp"
#include "support.hpp"

using namespace stegbench;
using namespace stegbench::lm;
using testsupport::split_all;

namespace {

// Independent add-k interpolation straight from string counts.
struct OracleModel {
  int n;
  double k;
  std::map<std::vector<std::string>, std::map<std::string, double>> counts;  // history -> next -> count

  OracleModel(const std::vector<std::vector<std::string>>& corpus, int order, double smoothing)
      : n(order), k(smoothing) {
    for (const auto& sent : corpus) {
      std::vector<std::string> padded(static_cast<std::size_t>(n - 1), "<s>");
      padded.insert(padded.end(), sent.begin(), sent.end());
      padded.push_back("</s>");
      for (std::size_t i = static_cast<std::size_t>(n - 1); i < padded.size(); ++i) {
        for (int m = 1; m <= n; ++m) {
          std::vector<std::string> hist(padded.begin() + static_cast<long>(i) - (m - 1), padded.begin() + static_cast<long>(i));
          counts[hist][padded[i]] += 1.0;
        }
      }
    }
  }

  double prob(std::vector<std::string> context, const std::string& word, double vprime) const {
    while (context.size() < static_cast<std::size_t>(n - 1)) context.insert(context.begin(), "<s>");
    double weight = 0.0;
    double mass = 0.0;
    for (int m = 1; m <= n; ++m) {
      std::vector<std::string> hist(context.end() - (m - 1), context.end());
      auto it = counts.find(hist);
      if (it == counts.end()) continue;
      double total = 0.0;
      for (const auto& [w, c] : it->second) total += c;
      const auto found = it->second.find(word);
      const double c = found == it->second.end() ? 0.0 : found->second;
      weight += total;
      mass += total * (c + k) / (total + k * vprime);
    }
    return mass / weight;
  }
};

double l1_to_uniform(const ConditionalDistribution& d) {
  const double u = 1.0 / static_cast<double>(d.size());
  double s = 0.0;
  for (const auto& e : d.entries()) s += std::abs(e.prob - u);
  return s;
}

}  // namespace

TEST_CASE("reserved ids and vocabulary order") {
  const auto model = train_ngram(split_all({"b a", "a c", "a"}), {});
  const auto& v = model.vocab();
  CHECK(v.size() == 6);
  CHECK(v.surface(kBos) == "<s>");
  CHECK(v.surface(kEos) == "</s>");
  CHECK(v.surface(kUnk) == "<unk>");
  // Count descending, then lexical.
  CHECK(v.surface(3) == "a");
  CHECK(v.surface(4) == "b");
  CHECK(v.surface(5) == "c");
  CHECK(v.lookup("zzz") == kUnk);
  CHECK(v.lookup("<s>") == kUnk);
  CHECK_THROWS_AS(v.surface(99), Error);
}

TEST_CASE("min_count drops rare words to unk") {
  NGramConfig cfg;
  cfg.min_count = 2;
  const auto model = train_ngram(split_all({"a b", "a c"}), cfg);
  CHECK(model.vocab().size() == 4);
  CHECK(model.encode("a b") == std::vector<TokenId>{3, kUnk});
}

TEST_CASE("add-k interpolation matches a string-count oracle") {
  for (int order : {1, 2, 3}) {
    for (double k : {0.1, 0.5, 2.0}) {
      NGramConfig cfg;
      cfg.order = order;
      cfg.smoothing_k = k;
      const auto corpus = split_all(testsupport::toy_lines());
      const auto model = train_ngram(corpus, cfg);
      const OracleModel oracle(corpus, order, k);
      const double vprime = static_cast<double>(model.vocab_size() - 1);
      const std::vector<std::vector<std::string>> contexts = {
          {}, {"the"}, {"the", "cat"}, {"sat", "on"}, {"tree", "tall"}, {"zebra"}, {"a", "green", "park"}};
      for (const auto& ctx : contexts) {
        std::vector<TokenId> ids;
        std::vector<std::string> surfaces;
        for (const auto& w : ctx) {
          ids.push_back(model.vocab().lookup(w));
          surfaces.push_back(model.vocab().surface(ids.back()));
        }
        const auto dist = model.next(ids);
        CHECK(dist.size() == model.vocab_size() - 1);
        for (const auto& e : dist.entries()) {
          CHECK(e.prob == doctest::Approx(oracle.prob(surfaces, model.vocab().surface(e.token), vprime)).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("hand-computed examples") {
  SUBCASE("repeated bigram is the argmax") {
    NGramConfig cfg;
    cfg.order = 2;
    cfg.smoothing_k = 0.5;
    const auto model = train_ngram(split_all({"a b", "a b"}), cfg);
    const TokenId a = model.vocab().find("a").value();
    const TokenId b = model.vocab().find("b").value();
    const auto ranked_entries = ranked(model.next(std::vector<TokenId>{kBos, a}));
    CHECK(ranked_entries.front().token == b);
    // V' = 4 (EOS, UNK, a, b). Bigram history "a": count 2, unigram total 6.
    const double bigram = (2 + 0.5) / (2 + 0.5 * 4);
    const double unigram = (2 + 0.5) / (6 + 0.5 * 4);
    CHECK(ranked_entries.front().prob == doctest::Approx((6 * unigram + 2 * bigram) / 8).epsilon(1e-12));
  }
  SUBCASE("unigram prefers a seen word over unk") {
    NGramConfig cfg;
    cfg.order = 1;
    const auto model = train_ngram(split_all({"x"}), cfg);
    const auto d = model.next({});
    CHECK(d.prob(model.vocab().find("x").value()) > d.prob(kUnk));
  }
  SUBCASE("unseen higher-order history falls back to the unigram") {
    const auto model = testsupport::toy_model();
    const TokenId unk_ctx[] = {kUnk, kUnk};
    CHECK(model.next(unk_ctx) == testsupport::toy_model(1).next({}));
  }
}

TEST_CASE("every reachable distribution is valid and repeatable") {
  const auto model = testsupport::toy_model();
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<TokenId> ctx{kBos};
    const std::size_t len = rng.below(5);
    for (std::size_t i = 0; i < len; ++i) ctx.push_back(static_cast<TokenId>(1 + rng.below(model.vocab_size() - 1)));
    const auto d = model.next(ctx);
    CHECK_NOTHROW(d.validate());
    CHECK(d == model.next(ctx));
  }
}

TEST_CASE("training and lookup errors") {
  CHECK_THROWS_WITH_AS(train_ngram({}, {}), doctest::Contains("TrainingDataEmpty"), Error);
  NGramConfig bad;
  bad.order = 0;
  try {
    train_ngram(split_all({"a"}), bad);
    FAIL("expected InvalidConfig");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidConfig);
  }
  bad = {};
  bad.smoothing_k = 0.0;
  CHECK_THROWS_AS(train_ngram(split_all({"a"}), bad), Error);

  const auto model = testsupport::toy_model();
  const TokenId outside[] = {static_cast<TokenId>(model.vocab_size())};
  try {
    model.next(outside);
    FAIL("expected UnknownToken");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownToken);
  }
  try {
    sequence_neg_log_prob(model, {});
    FAIL("expected EmptySentence");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptySentence);
  }
}

TEST_CASE("neg log prob and perplexity on hand-built distributions") {
  const testsupport::FnProvider halves(4, [](auto) {
    return ConditionalDistribution({{1, 0.5}, {3, 0.5}});
  });
  const TokenId two[] = {3, 3};
  CHECK(sequence_neg_log_prob(halves, two) == doctest::Approx(1.3862944).epsilon(1e-7));
  CHECK(std::abs(perplexity(halves, two) - 2.0) <= 1e-9);

  const testsupport::FnProvider certain(4, [](auto) { return ConditionalDistribution({{3, 1.0}}); });
  const TokenId three[] = {3, 3, 3};
  CHECK(sequence_neg_log_prob(certain, three) == 0.0);
  CHECK(perplexity(certain, three) == 1.0);
}

TEST_CASE("order-1 scores are additive over concatenation") {
  const auto model = testsupport::toy_model(1);
  const auto s1 = model.encode("the cat sat");
  const auto s2 = model.encode("a dog ran");
  auto both = s1;
  both.insert(both.end(), s2.begin(), s2.end());
  CHECK(sequence_neg_log_prob(model, both) ==
        doctest::Approx(sequence_neg_log_prob(model, s1) + sequence_neg_log_prob(model, s2)).epsilon(1e-12));
}

TEST_CASE("perplexity agrees with exp(nll / N)") {
  const auto model = testsupport::toy_model();
  Rng rng(9);
  for (int i = 0; i < 100; ++i) {
    std::vector<TokenId> s(1 + rng.below(20));
    for (auto& t : s) t = static_cast<TokenId>(1 + rng.below(model.vocab_size() - 1));
    const double nll = sequence_neg_log_prob(model, s);
    CHECK(std::abs(perplexity(model, s) - std::exp(nll / static_cast<double>(s.size()))) <= 1e-12);
    CHECK(perplexity(model, s) >= 1.0);
  }
}

TEST_CASE("save and load keep distributions bit-identical") {
  const auto model = testsupport::toy_model();
  std::stringstream buf;
  model.save(buf);
  const auto loaded = NGramModel::load(buf);
  std::stringstream again;
  loaded.save(again);
  CHECK(again.str() == buf.str());

  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    std::vector<TokenId> ctx{kBos};
    for (std::size_t j = rng.below(4); j > 0; --j) ctx.push_back(static_cast<TokenId>(1 + rng.below(model.vocab_size() - 1)));
    const auto a = model.next(ctx);
    const auto b = loaded.next(ctx);
    REQUIRE(a.size() == b.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
      CHECK(a.entries()[j].token == b.entries()[j].token);
      CHECK(std::memcmp(&a.entries()[j].prob, &b.entries()[j].prob, sizeof(double)) == 0);
    }
  }
}

TEST_CASE("load rejects a damaged model file") {
  std::stringstream buf("stegbench-ngram 1\norder x\n");
  CHECK_THROWS_AS(NGramModel::load(buf), Error);
}

TEST_CASE("larger k moves distributions toward uniform") {
  const auto corpus = split_all(testsupport::toy_lines());
  const std::vector<std::vector<std::string>> contexts = {{}, {"the"}, {"the", "cat"}, {"in", "the"}, {"we"}};
  for (const auto& ctx : contexts) {
    double previous = std::numeric_limits<double>::infinity();
    for (double k : {0.01, 0.05, 0.1, 0.5, 1.0, 5.0, 50.0}) {
      NGramConfig cfg;
      cfg.smoothing_k = k;
      const auto model = train_ngram(corpus, cfg);
      std::vector<TokenId> ids;
      for (const auto& w : ctx) ids.push_back(model.vocab().lookup(w));
      const double d = l1_to_uniform(model.next(ids));
      CHECK(d <= previous + 1e-15);
      previous = d;
    }
  }
}

TEST_CASE("tokenizer splits on whitespace") {
  CHECK(tokenize("  The  cat\tsat ") == std::vector<std::string>{"The", "cat", "sat"});
  CHECK(tokenize("The Cat", true) == std::vector<std::string>{"the", "cat"});
  CHECK(tokenize("   ").empty());
  CHECK_THROWS_AS(read_lines("/nonexistent/file.txt"), Error);
}
