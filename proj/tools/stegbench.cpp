// Command-line front end for the benchmark library.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "stegbench/bench/config.hpp"
#include "stegbench/bench/experiment.hpp"
#include "stegbench/bench/records.hpp"
#include "stegbench/bench/report.hpp"
#include "stegbench/bench/synthetic.hpp"
#include "stegbench/codec/stego.hpp"
#include "stegbench/detect/detector.hpp"
#include "stegbench/error.hpp"
#include "stegbench/features/scatter.hpp"
#include "stegbench/lm/ngram_model.hpp"
#include "stegbench/lm/tokenizer.hpp"
#include "stegbench/metrics/metrics.hpp"
#include "stegbench/prompt/dataset.hpp"

namespace fs = std::filesystem;
using namespace stegbench;

namespace {

struct CodecOptions {
  int flc_bits = 1;
  int hc_pool = 32;
  int ac_precision = 64;
  int ac_topk = 0;
  int adg_max_r = 8;
  std::size_t max_tokens = 512;

  void attach(CLI::App* app) {
    app->add_option("--flc-bits", flc_bits, "FLC bits per token")->capture_default_str();
    app->add_option("--hc-pool", hc_pool, "HC candidate pool size")->capture_default_str();
    app->add_option("--ac-precision", ac_precision, "AC interval precision in bits")->capture_default_str();
    app->add_option("--ac-topk", ac_topk, "AC top-k truncation, 0 for none")->capture_default_str();
    app->add_option("--adg-max-r", adg_max_r, "ADG bound on bits per step")->capture_default_str();
    app->add_option("--max-tokens", max_tokens, "sentence length cap")->capture_default_str();
  }

  codec::CodecParams params(const std::string& algo, std::uint64_t seed) const {
    codec::CodecParams p;
    p.algorithm = codec::parse_algorithm(algo);
    p.flc_bits_per_step = flc_bits;
    p.hc_pool_size = hc_pool;
    p.ac_precision = ac_precision;
    p.ac_topk = ac_topk;
    p.adg_max_r = adg_max_r;
    p.max_tokens = max_tokens;
    p.rng_seed = seed;
    return p;
  }
};

std::vector<std::vector<lm::TokenId>> encode_lines(const lm::NGramModel& model, const fs::path& path) {
  std::vector<std::vector<lm::TokenId>> out;
  for (const auto& line : lm::read_lines(path)) out.push_back(model.encode(line));
  return out;
}

std::vector<features::SentenceFeatures> features_of(const lm::NGramModel& model, const fs::path& path) {
  std::vector<features::SentenceFeatures> out;
  for (const auto& tokens : encode_lines(model, path)) out.push_back(features::extract_features(model, tokens));
  return out;
}

std::vector<detect::Sample> samples_of(std::span<const features::SentenceFeatures> feats, Label label,
                                       const features::CoverStats& stats) {
  std::vector<detect::Sample> out;
  for (const auto& f : feats) out.push_back({detect::feature_vector(f, features::normalize(f, stats)), label});
  return out;
}

void print_counts(const metrics::ConfusionCounts& c) {
  const auto m = metrics::summarize(c);
  std::printf("TS %llu  FS %llu  US %llu  TN %llu  FN %llu  UN %llu\n", static_cast<unsigned long long>(c.ts),
              static_cast<unsigned long long>(c.fs), static_cast<unsigned long long>(c.us),
              static_cast<unsigned long long>(c.tn), static_cast<unsigned long long>(c.fn),
              static_cast<unsigned long long>(c.un));
  std::printf("accuracy %s  precision %s  recall %s  f1 %s\n", metrics::percent(m.accuracy).c_str(),
              metrics::percent(m.precision).c_str(), metrics::percent(m.recall).c_str(),
              metrics::percent(m.f1).c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steganalysis benchmark: n-gram LM, stego codecs, feature detector, prompt datasets."};
  app.require_subcommand(1);

  // train-lm
  auto* train_lm = app.add_subcommand("train-lm", "Train an n-gram model on a corpus or a synthetic preset");
  std::string corpus_path, preset_name, model_out;
  std::size_t preset_sentences = 3000;
  std::uint64_t preset_seed = 0;
  lm::NGramConfig lm_cfg;
  auto* corpus_opt = train_lm->add_option("--corpus", corpus_path, "one sentence per line");
  auto* preset_opt = train_lm->add_option("--preset", preset_name, "movie, news or tweet");
  corpus_opt->excludes(preset_opt);
  train_lm->add_option("--sentences", preset_sentences, "preset corpus size")->capture_default_str();
  train_lm->add_option("--seed", preset_seed, "preset corpus seed")->capture_default_str();
  train_lm->add_option("--order", lm_cfg.order)->capture_default_str();
  train_lm->add_option("--k", lm_cfg.smoothing_k, "add-k constant")->capture_default_str();
  train_lm->add_option("--min-count", lm_cfg.min_count)->capture_default_str();
  train_lm->add_flag("--lowercase", lm_cfg.lowercase);
  train_lm->add_option("--out", model_out, "model file")->required();

  // synth
  auto* synth = app.add_subcommand("synth", "Generate covers or stegos with a trained model");
  std::string model_path, algo, source_name = "custom", out_dir;
  std::size_t count = 100, payload_len = 64;
  std::uint64_t seed = 0;
  CodecOptions synth_codec;
  synth->add_option("--model", model_path)->required();
  synth->add_option("--algo", algo, "natural, flc, hc, ac or adg")->required();
  synth->add_option("--count", count)->capture_default_str();
  synth->add_option("--seed", seed)->capture_default_str();
  synth->add_option("--payload-bits", payload_len, "random payload length per stego")->capture_default_str();
  synth->add_option("--source", source_name, "source name used in ids and file names")->capture_default_str();
  synth->add_option("--out", out_dir, "directory for <source>-<algo>.txt and .meta.jsonl")->required();
  synth_codec.attach(synth);

  // embed
  auto* embed = app.add_subcommand("embed", "Hide a payload in a generated sentence");
  std::string payload_hex, payload_binary;
  CodecOptions embed_codec;
  embed->add_option("--model", model_path)->required();
  embed->add_option("--algo", algo)->required();
  auto* hex_opt = embed->add_option("--payload-hex", payload_hex);
  embed->add_option("--payload-binary", payload_binary, "payload as 0/1 characters")->excludes(hex_opt);
  embed->add_option("--seed", seed)->capture_default_str();
  embed_codec.attach(embed);

  // extract
  auto* extract = app.add_subcommand("extract", "Recover payloads from stego sentences");
  std::string text_path;
  CodecOptions extract_codec;
  extract->add_option("--model", model_path)->required();
  extract->add_option("--algo", algo)->required();
  extract->add_option("--tokens-file,--text-file", text_path, "one stego sentence per line, space-separated tokens")->required();
  extract_codec.attach(extract);

  // features
  auto* feats = app.add_subcommand("features", "Per-sentence NLL, PPL and z-score as CSV");
  std::string input_path, covers_path, out_path, label_name = "cover";
  feats->add_option("--model", model_path)->required();
  feats->add_option("--input", input_path, "one sentence per line")->required();
  feats->add_option("--label", label_name, "stego or cover")->capture_default_str();
  feats->add_option("--covers", covers_path, "cover corpus for z-score statistics");
  feats->add_option("--out", out_path)->required();

  // train-detector
  auto* train_det = app.add_subcommand("train-detector", "Train the logistic feature detector");
  std::string stego_path, cover_path;
  detect::TrainConfig det_cfg;
  train_det->add_option("--model", model_path)->required();
  train_det->add_option("--stego", stego_path)->required();
  train_det->add_option("--cover", cover_path)->required();
  train_det->add_option("--lr", det_cfg.learning_rate)->capture_default_str();
  train_det->add_option("--epochs", det_cfg.epochs)->capture_default_str();
  train_det->add_option("--l2", det_cfg.l2)->capture_default_str();
  train_det->add_option("--seed", det_cfg.seed)->capture_default_str();
  train_det->add_option("--out", out_path)->required();

  // eval
  auto* eval = app.add_subcommand("eval", "Score a detector on labelled sentences");
  std::string detector_path, errors_path;
  eval->add_option("--model", model_path)->required();
  eval->add_option("--detector", detector_path)->required();
  eval->add_option("--stego", stego_path)->required();
  eval->add_option("--cover", cover_path)->required();
  eval->add_option("--errors", errors_path, "write misclassified sentences as CSV");

  // bench run
  auto* bench = app.add_subcommand("bench", "Run experiment protocols");
  bench->require_subcommand(1);
  auto* bench_run = bench->add_subcommand("run", "Run an experiment config");
  std::string config_path, output_override;
  bool force = false;
  bench_run->add_option("config", config_path, "JSON experiment config")->required();
  bench_run->add_option("--output", output_override, "run directory, overrides output_dir");
  bench_run->add_flag("--force", force, "replace an existing run directory");

  // build-prompts
  auto* prompts = app.add_subcommand("build-prompts", "Render instruction datasets for fine-tuning");
  int template_id = 2;
  std::string algorithm_name = "unknown";
  prompts->add_option("--stego", stego_path)->required();
  prompts->add_option("--cover", cover_path)->required();
  prompts->add_option("--template", template_id, "1-8")->capture_default_str();
  prompts->add_option("--seed", seed)->capture_default_str();
  prompts->add_option("--source", source_name)->capture_default_str();
  prompts->add_option("--algorithm", algorithm_name, "algorithm tag of the stego file")->capture_default_str();
  prompts->add_option("--out", out_dir, "directory for train/valid/test.jsonl")->required();

  // report
  auto* report = app.add_subcommand("report", "Verify a run report or score model answers");
  std::string run_dir, records_path, answers_path;
  auto* run_opt = report->add_option("--run", run_dir, "run directory to verify and print");
  auto* rec_opt = report->add_option("--records", records_path, "prompt records (test.jsonl)");
  auto* ans_opt = report->add_option("--answers", answers_path, "answers JSONL: id, answer, latency_ms");
  report->add_option("--template", template_id)->capture_default_str();
  run_opt->excludes(rec_opt)->excludes(ans_opt);
  rec_opt->needs(ans_opt);
  ans_opt->needs(rec_opt);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_lm) {
      std::vector<std::vector<std::string>> corpus;
      if (!corpus_path.empty()) {
        corpus = lm::read_corpus(corpus_path, lm_cfg.lowercase);
      } else if (!preset_name.empty()) {
        for (const auto& l : bench::synthesize_sentences(bench::find_preset(preset_name), preset_sentences, preset_seed)) {
          corpus.push_back(lm::tokenize(l, lm_cfg.lowercase));
        }
      } else {
        throw Error(ErrorCode::InvalidConfig, "train-lm needs --corpus or --preset");
      }
      const auto model = lm::train_ngram(corpus, lm_cfg);
      model.save(model_out);
      std::printf("vocab %zu  sentences %zu\n", model.vocab_size(), corpus.size());
    } else if (*synth) {
      const auto model = lm::NGramModel::load(model_path);
      bench::DatasetSpec spec;
      spec.source = source_name;
      spec.algorithm = algo;
      for (auto& c : spec.algorithm) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      spec.count = count;
      spec.seed = seed;
      if (!spec.natural()) spec.codec = synth_codec.params(spec.algorithm, 0);
      bench::SynthesisOptions opts;
      opts.payload_bits = payload_len;
      const auto records = bench::synthesize_dataset(model, spec, opts);
      bench::write_corpus(out_dir, spec, records);
      std::vector<features::SentenceFeatures> f;
      for (const auto& r : records) f.push_back(r.features);
      const auto stats = features::summarize(f);
      std::printf("%zu sentences  mean tokens %.2f  mean ppl %.2f\n", records.size(), stats.mean_tokens, stats.mean_ppl);
    } else if (*embed) {
      const auto model = lm::NGramModel::load(model_path);
      codec::Payload payload;
      if (!payload_binary.empty()) {
        for (char c : payload_binary) {
          if (c != '0' && c != '1') throw Error(ErrorCode::InvalidParams, "payload-binary takes 0 and 1 only");
          payload.bits.push_back(c == '1');
        }
      } else {
        payload = codec::Payload::from_hex(payload_hex);
      }
      const auto stego = codec::encode(model, payload, embed_codec.params(algo, seed));
      std::printf("%s\n", model.decode(stego.tokens).c_str());
      std::fprintf(stderr, "tokens %zu  embedding tokens %zu  bits %zu\n", stego.tokens.size(), stego.embedding_tokens,
                   stego.embedded_bit_count);
    } else if (*extract) {
      const auto model = lm::NGramModel::load(model_path);
      const auto params = extract_codec.params(algo, 0);
      for (const auto& tokens : encode_lines(model, text_path)) {
        const auto payload = codec::decode(model, tokens, params);
        std::string binary;
        for (auto b : payload.bits) binary += b ? '1' : '0';
        std::printf("%zu %s %s\n", payload.bits.size(), payload.to_hex().c_str(), binary.c_str());
      }
    } else if (*feats) {
      const auto model = lm::NGramModel::load(model_path);
      std::optional<features::CoverStats> stats;
      if (!covers_path.empty()) stats = features::fit_cover_stats(features_of(model, covers_path));
      const Label label = parse_label(label_name);
      std::vector<features::ScatterRecord> rows;
      std::size_t i = 0;
      for (const auto& f : features_of(model, input_path)) {
        features::ScatterRecord r;
        r.id = std::to_string(i++);
        r.label = label;
        r.features = f;
        if (stats) r.z_score = features::normalize(f, *stats);
        rows.push_back(std::move(r));
      }
      features::export_scatter(rows, out_path);
    } else if (*train_det) {
      const auto model = lm::NGramModel::load(model_path);
      const auto covers = features_of(model, cover_path);
      const auto stats = features::fit_cover_stats(covers);
      auto samples = samples_of(features_of(model, stego_path), Label::Stego, stats);
      const auto cover_samples = samples_of(covers, Label::Cover, stats);
      samples.insert(samples.end(), cover_samples.begin(), cover_samples.end());
      auto detector = detect::train_detector(std::move(samples), det_cfg);
      detector.set_cover_stats(stats);
      detector.save(fs::path(out_path));
    } else if (*eval) {
      const auto model = lm::NGramModel::load(model_path);
      const auto detector = detect::FeatureDetector::load(fs::path(detector_path));
      if (!detector.cover_stats()) throw Error(ErrorCode::InvalidConfig, "detector file has no cover statistics");
      std::vector<features::ScatterRecord> rows;
      for (const auto& [path, label] : {std::pair{stego_path, Label::Stego}, std::pair{cover_path, Label::Cover}}) {
        std::size_t i = 0;
        for (const auto& f : features_of(model, path)) {
          features::ScatterRecord r;
          r.id = std::string(to_string(label)) + "-" + std::to_string(i++);
          r.label = label;
          r.features = f;
          r.z_score = features::normalize(f, *detector.cover_stats());
          r.verdict = detect::predict(detector, detect::feature_vector(f, *r.z_score)).label;
          rows.push_back(std::move(r));
        }
      }
      metrics::ConfusionCounts counts;
      for (const auto& r : rows) counts.add(metrics::classify(r.label, r.verdict));
      print_counts(counts);
      if (!errors_path.empty()) bench::error_export(rows, errors_path);
    } else if (*bench_run) {
      auto cfg = bench::load_config(config_path);
      if (!output_override.empty()) cfg.output_dir = output_override;
      if (force && !cfg.output_dir.empty()) fs::remove_all(cfg.output_dir);
      const auto result = bench::run_experiment(cfg);
      std::cout << bench::report_text(result);
    } else if (*prompts) {
      std::vector<prompt::LabeledSentence> sentences;
      for (const auto& [path, label] : {std::pair{stego_path, Label::Stego}, std::pair{cover_path, Label::Cover}}) {
        std::size_t i = 0;
        for (const auto& line : lm::read_lines(path)) {
          const std::string alg = label == Label::Stego ? algorithm_name : std::string(bench::kNatural);
          sentences.push_back({source_name + "-" + alg + "-" + std::to_string(i++), line, label, source_name, alg});
        }
      }
      const auto splits = prompt::build_dataset(sentences, template_id, seed);
      prompt::write_dataset(out_dir, splits);
      std::printf("train %zu  valid %zu  test %zu\n", splits.train.size(), splits.valid.size(), splits.test.size());
    } else if (*report) {
      if (!run_dir.empty()) {
        const auto r = bench::load_report(fs::path(run_dir) / "reports" / "report.json");
        std::cout << bench::report_text(r);
        std::printf("\nverified %zu cells\n", r.cells.size());
      } else if (!records_path.empty()) {
        const auto records = prompt::read_records(records_path);
        const auto answers = prompt::read_answers(answers_path);
        print_counts(bench::score_answers(records, answers, template_id));
      } else {
        throw Error(ErrorCode::InvalidConfig, "report needs --run or --records with --answers");
      }
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
