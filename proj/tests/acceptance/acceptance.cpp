// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Diagnostics follow their criterion line, indented.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include "stegbench/bench/config.hpp"
#include "stegbench/bench/experiment.hpp"
#include "stegbench/bench/records.hpp"
#include "stegbench/bench/report.hpp"
#include "stegbench/bench/synthetic.hpp"
#include "stegbench/codec/stego.hpp"
#include "stegbench/detect/detector.hpp"
#include "stegbench/features/features.hpp"
#include "stegbench/lm/ngram_model.hpp"
#include "stegbench/lm/scoring.hpp"
#include "stegbench/lm/tokenizer.hpp"
#include "stegbench/metrics/metrics.hpp"
#include "stegbench/prompt/dataset.hpp"
#include "stegbench/prompt/templates.hpp"
#include "stegbench/rng.hpp"
#include "support.hpp"
#include "published_rows.hpp"

namespace fs = std::filesystem;
using namespace stegbench;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  std::vector<std::string> notes;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch() {
  static const fs::path dir = [] {
    const auto d = fs::temp_directory_path() / "stegbench-acceptance";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

// The movie preset model every model-based criterion shares.
const lm::NGramModel& movie_model() {
  static const lm::NGramModel model = [] {
    const auto lines = bench::synthesize_sentences(bench::find_preset("movie"), 3000, derive_seed(1, "corpus:movie"));
    std::vector<std::vector<std::string>> corpus;
    for (const auto& l : lines) corpus.push_back(lm::tokenize(l));
    return lm::train_ngram(corpus, {});
  }();
  return model;
}

codec::Payload random_payload(Rng& rng, std::size_t bits) {
  codec::Payload p;
  p.bits.resize(bits);
  for (auto& b : p.bits) b = rng.bit();
  return p;
}

Outcome published_metrics() {
  Outcome o;
  int exact = 0, within = 0;
  for (const auto& row : testsupport::kGenericRows) {
    metrics::ConfusionCounts c;
    c.ts = row.tp;
    c.fn = row.fn;
    c.fs = row.fp;
    c.tn = row.tn;
    const double acc = metrics::accuracy(c), f1 = metrics::f1(c);
    const bool ok = std::abs(acc - row.accuracy / 100) <= 0.005 && std::abs(f1 - row.f1 / 100) <= 0.005;
    within += ok;
    const auto acc_s = metrics::percent(acc), f1_s = metrics::percent(f1);
    const bool same = acc_s == fmt("%.2f", row.accuracy) && f1_s == fmt("%.2f", row.f1);
    exact += same;
    if (!same) {
      o.notes.push_back(std::string(row.name) + ": computed accuracy " + acc_s + " f1 " + f1_s + ", published " +
                        fmt("%.2f", row.accuracy) + " " + fmt("%.2f", row.f1) + " (cells sum to " +
                        std::to_string(row.tp + row.fn + row.fp + row.tn) + ")");
    }
  }
  o.pass = within == 16;
  o.detail = std::to_string(within) + "/16 rows within 0.005, " + std::to_string(exact) + "/16 identical at two decimals";
  return o;
}

// Criterion 2. Also collects ADG imbalance along every embedding step.
double g_adg_worst_slack = 1.0;
std::size_t g_adg_steps = 0;

Outcome roundtrip() {
  const auto& model = movie_model();
  Outcome o;
  Rng rng(2024);
  std::size_t ok = 0, total = 0;
  for (auto algo : {codec::Algorithm::FLC, codec::Algorithm::HC, codec::Algorithm::AC, codec::Algorithm::ADG}) {
    std::size_t algo_ok = 0, algo_total = 0;
    for (std::size_t len : {0, 1, 8, 64, 256}) {
      for (int seed = 0; seed < 100; ++seed) {
        codec::CodecParams params;
        params.algorithm = algo;
        params.rng_seed = derive_seed(static_cast<std::uint64_t>(seed), "roundtrip");
        const auto payload = random_payload(rng, len);
        bool good = false;
        try {
          const auto stego = codec::encode(model, payload, params);
          good = codec::decode(model, stego.tokens, params) == payload;
          if (algo == codec::Algorithm::ADG) {
            std::vector<lm::TokenId> ctx;
            for (lm::TokenId t : stego.tokens) {
              const auto cb = codec::build_codebook(codec::embedding_distribution(model, ctx), params);
              const auto [mn, mx] = std::minmax_element(cb.grouping.prob_masses.begin(), cb.grouping.prob_masses.end());
              g_adg_worst_slack = std::min(g_adg_worst_slack, cb.pool.front().prob - (*mx - *mn));
              ++g_adg_steps;
              ctx.push_back(t);
            }
          }
        } catch (const Error& e) {
          o.notes.push_back(std::string(to_string(algo)) + " length " + std::to_string(len) + ": " + e.what());
        }
        algo_ok += good;
        ++algo_total;
      }
    }
    o.notes.push_back(std::string(to_string(algo)) + ": " + std::to_string(algo_ok) + "/" + std::to_string(algo_total));
    ok += algo_ok;
    total += algo_total;
  }
  o.pass = ok == total;
  o.detail = std::to_string(ok) + "/" + std::to_string(total) + " payloads recovered bit-exact";
  return o;
}

Outcome adg_preservation() {
  const auto& model = movie_model();
  Outcome o;
  codec::CodecParams params;
  params.algorithm = codec::Algorithm::ADG;
  const std::vector<lm::TokenId> context;
  const auto dist = codec::embedding_distribution(model, context);
  const auto cb = codec::build_codebook(dist, params);
  Rng bits(7), sampler(8);
  std::map<lm::TokenId, double> freq;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const auto group = static_cast<int>(bits.below(std::size_t{1} << cb.grouping.bits));
    freq[codec::sample_in_group(cb.pool, cb.grouping, group, sampler)] += 1.0;
  }
  double kl = 0.0;
  for (const auto& e : cb.pool) {
    const double q = freq[e.token] / n;
    if (q > 0) kl += q * std::log(q / e.prob);
  }
  const bool balanced = g_adg_steps > 0 && g_adg_worst_slack >= -1e-12;
  o.pass = kl <= 0.01 && balanced;
  o.detail = "KL " + fmt("%.5f", kl) + " nats over " + std::to_string(n) + " draws (r=" +
             std::to_string(cb.grouping.bits) + ", " + std::to_string(cb.pool.size()) + " tokens); imbalance <= p_max at " +
             std::to_string(g_adg_steps) + " steps, min slack " + fmt("%.3g", g_adg_worst_slack);
  o.notes.push_back("plug-in KL bias for this support is about " + fmt("%.4f", (cb.pool.size() - 1) / (2.0 * n)));
  return o;
}

Outcome hc_distortion() {
  const auto& model = movie_model();
  bench::SynthesisOptions opts;
  codec::CodecParams hc;
  hc.algorithm = codec::Algorithm::HC;
  const auto stegos = bench::synthesize_dataset(model, {"movie", "hc", 1000, 31, hc}, opts);
  const auto covers = bench::synthesize_dataset(model, {"movie", "natural", 1000, 32, std::nullopt}, opts);
  double s = 0, c = 0;
  for (const auto& r : stegos) s += r.features.ppl;
  for (const auto& r : covers) c += r.features.ppl;
  s /= 1000;
  c /= 1000;
  Outcome o;
  o.pass = s <= 0.95 * c;
  o.detail = "mean PPL stego " + fmt("%.2f", s) + " vs cover " + fmt("%.2f", c) + " (" + fmt("%.1f", 100 * (1 - s / c)) +
             "% lower)";
  return o;
}

Outcome nll_oracle() {
  Outcome o;
  const testsupport::FnProvider halves(4, [](auto) { return lm::ConditionalDistribution({{1, 0.5}, {3, 0.5}}); });
  const lm::TokenId two[] = {3, 3};
  const double nll = lm::sequence_neg_log_prob(halves, two);
  const double ppl = lm::perplexity(halves, two);
  bool ok = std::abs(nll - 1.3862944) <= 1e-6 && std::abs(ppl - 2.0) <= 1e-9;

  const auto& model = movie_model();
  Rng rng(5);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<lm::TokenId> s(1 + rng.below(60));
    for (auto& t : s) t = static_cast<lm::TokenId>(lm::kFirstWordId + rng.below(model.vocab_size() - lm::kFirstWordId));
    const double n = lm::sequence_neg_log_prob(model, s);
    worst = std::max(worst, std::abs(lm::perplexity(model, s) - std::exp(n / static_cast<double>(s.size()))));
  }
  ok = ok && worst <= 1e-9;
  o.pass = ok;
  o.detail = "nll " + fmt("%.7f", nll) + " ppl " + fmt("%.9f", ppl) + "; worst |ppl - exp(nll/N)| over 1000 sentences " +
             fmt("%.3g", worst);
  return o;
}

// The detector run doubles as the first determinism run.
const std::string kDetectorConfig = R"({
  "mode": "domain_specific", "seed": 11, "payload_bits": 128,
  "sources": {"movie": {"preset": "movie", "sentences": 3000}},
  "train": [{"source": "movie", "algorithm": "flc", "count": 1000, "codec": {"flc_bits": 4}},
            {"source": "movie", "algorithm": "hc", "count": 1000, "codec": {"hc_pool": 32}}]
})";

bench::Report run_bench(const std::string& name) {
  auto cfg = bench::parse_config(kDetectorConfig);
  cfg.output_dir = scratch() / name;
  return bench::run_experiment(cfg);
}

Outcome detector() {
  Outcome o;
  Rng rng(19);
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  for (int i = 0; i < 60; ++i) {
    x.push_back({4 * rng.uniform() - 2, 4 * rng.uniform() - 2, 4 * rng.uniform() - 2});
    y.push_back(rng.bit() ? 1.0 : 0.0);
  }
  const detect::LogisticObjective obj(x, y, 1e-3);
  double worst = 0.0;
  for (int p = 0; p < 20; ++p) {
    std::vector<double> w(obj.dimension());
    for (auto& v : w) v = 6 * rng.uniform() - 3;
    const auto g = obj.gradient(w);
    for (std::size_t i = 0; i < w.size(); ++i) {
      auto a = w, b = w;
      a[i] += 1e-6;
      b[i] -= 1e-6;
      const double numeric = (obj.loss(a) - obj.loss(b)) / 2e-6;
      worst = std::max(worst, std::abs(numeric - g[i]) / std::max(1.0, std::abs(g[i])));
    }
  }
  const auto report = run_bench("run-a");
  const double flc = metrics::accuracy(report.find("movie-flc", "movie-flc")->counts);
  const double hc = metrics::accuracy(report.find("movie-hc", "movie-hc")->counts);
  o.pass = worst <= 1e-5 && flc >= 0.95 && hc >= 0.75;
  o.detail = "gradient rel. error " + fmt("%.2g", worst) + "; test accuracy FLC b=4 " + fmt("%.4f", flc) +
             ", HC pool 32 " + fmt("%.4f", hc);
  return o;
}

Outcome prompt_fidelity() {
  Outcome o;
  int golden = 0, parsed = 0, unknown = 0;
  for (int id = 1; id <= prompt::kTemplateCount; ++id) {
    const fs::path dir = STEGBENCH_GOLDEN_DIR;
    const std::string stem = "prompt_" + std::to_string(id) + "_";
    golden += prompt::render(id, "hello world") == read_file(dir / (stem + "infer.txt"));
    golden += prompt::render(id, "hello world", Label::Stego) == read_file(dir / (stem + "stego.txt"));
    golden += prompt::render(id, "hello world", Label::Cover) == read_file(dir / (stem + "cover.txt"));
    for (Label l : {Label::Stego, Label::Cover}) {
      const auto r = prompt::parse_answer(id, prompt::label_string(id, l), l);
      parsed += r.cell == (l == Label::Stego ? metrics::Cell::TS : metrics::Cell::TN);
    }
    for (const char* junk : {"maybe", "", "I cannot tell", "42"}) {
      unknown += prompt::parse_answer(id, junk, Label::Stego).cell == metrics::Cell::US;
      unknown += prompt::parse_answer(id, junk, Label::Cover).cell == metrics::Cell::UN;
    }
  }
  o.pass = golden == 24 && parsed == 16 && unknown == 64;
  o.detail = std::to_string(golden) + "/24 golden files, " + std::to_string(parsed) + "/16 label round trips, " +
             std::to_string(unknown) + "/64 unmatched answers as US/UN";
  return o;
}

Outcome normalization() {
  const auto& model = movie_model();
  std::vector<features::SentenceFeatures> covers;
  for (std::uint64_t s = 0; covers.size() < 1000; ++s) {
    const auto c = codec::generate_cover(model, s, 512);
    if (!c.empty()) covers.push_back(features::extract_features(model, c));
  }
  const auto stats = features::fit_cover_stats(covers);
  double sum = 0, sq = 0;
  for (const auto& f : covers) sum += features::normalize(f, stats);
  const double mean = sum / static_cast<double>(covers.size());
  for (const auto& f : covers) {
    const double d = features::normalize(f, stats) - mean;
    sq += d * d;
  }
  const double sd = std::sqrt(sq / static_cast<double>(covers.size()));
  Outcome o;
  o.pass = std::abs(mean) < 1e-9 && std::abs(sd - 1.0) < 1e-9;
  o.detail = "mean " + fmt("%.3g", mean) + ", std - 1 " + fmt("%.3g", sd - 1.0) + " over 1000 covers";
  return o;
}

Outcome determinism() {
  run_bench("run-b");
  const auto a = scratch() / "run-a", b = scratch() / "run-b";
  std::size_t files = 0, same = 0;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file()) continue;
    ++files;
    same += read_file(e.path()) == read_file(b / fs::relative(e.path(), a));
  }
  const bool reports = read_file(a / "reports/report.json") == read_file(b / "reports/report.json") &&
                       read_file(a / "reports/report.txt") == read_file(b / "reports/report.txt");

  std::vector<std::string> keys;
  for (int i = 0; i < 20000; ++i) keys.push_back(i % 2 ? "cover|movie|natural" : "stego|movie|ac");
  const auto split = prompt::stratified_split(keys, 3);
  const bool sizes = split.train.size() == 12000 && split.valid.size() == 4000 && split.test.size() == 4000;

  Outcome o;
  o.pass = reports && same == files && sizes;
  o.detail = std::string("reports ") + (reports ? "identical" : "differ") + ", " + std::to_string(same) + "/" +
             std::to_string(files) + " run files identical; split of 20000 -> " + std::to_string(split.train.size()) +
             "/" + std::to_string(split.valid.size()) + "/" + std::to_string(split.test.size());
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
    double limit_s;  // 0 for none
  };
  const Criterion criteria[] = {
      {"published-metrics", published_metrics, 1},
      {"codec-roundtrip", roundtrip, 120},
      {"adg-distribution", adg_preservation, 60},
      {"hc-distortion", hc_distortion, 0},
      {"nll-ppl-oracle", nll_oracle, 0},
      {"detector-soundness", detector, 0},
      {"prompt-fidelity", prompt_fidelity, 0},
      {"normalization", normalization, 0},
      {"protocol-determinism", determinism, 0},
  };
  movie_model();
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("threw ") + e.what();
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_s > 0 && s >= c.limit_s) {
      o.pass = false;
      o.detail += "; over the " + fmt("%.0f", c.limit_s) + " s budget";
    }
    std::printf("%s %-22s %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), s);
    for (const auto& n : o.notes) std::printf("     %s\n", n.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
  return failed == 0 ? 0 : 1;
}
