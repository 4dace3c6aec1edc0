#include "stegbench/bench/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "stegbench/bench/synthetic.hpp"
#include "stegbench/error.hpp"
#include "stegbench/lm/tokenizer.hpp"
#include "stegbench/rng.hpp"

namespace stegbench::bench {

namespace fs = std::filesystem;

namespace {

std::string natural_key(const std::string& source) { return source + "-" + std::string(kNatural); }

struct Need {
  std::size_t train = 0;
  std::size_t valid = 0;
  std::size_t test = 0;
};

}  // namespace

std::vector<DatasetSpec> natural_specs(const ExperimentConfig& config) {
  // Covers per source: the training mix of one detector takes consecutive
  // slices, every other use starts at the front of its split.
  std::map<std::string, Need> need;
  auto require = [&](const std::vector<DatasetSpec>& specs, bool accumulate) {
    std::map<std::string, Need> sum;
    for (const auto& s : specs) {
      const auto sz = prompt::split_sizes(s.count);
      auto& n = sum[s.source];
      n.train = accumulate ? n.train + sz.train : std::max(n.train, sz.train);
      n.valid = accumulate ? n.valid + sz.valid : std::max(n.valid, sz.valid);
      n.test = accumulate ? n.test + sz.test : std::max(n.test, sz.test);
    }
    for (const auto& [src, n] : sum) {
      auto& m = need[src];
      m.train = std::max(m.train, n.train);
      m.valid = std::max(m.valid, n.valid);
      m.test = std::max(m.test, n.test);
    }
  };
  require(config.train, config.mode == Mode::General);
  require(config.test, false);

  std::vector<DatasetSpec> out;
  for (const auto& [src, n] : need) {
    std::size_t count = std::max<std::size_t>(1, n.train + n.valid + n.test);
    for (;; ++count) {
      const auto sz = prompt::split_sizes(count);
      if (sz.train >= n.train && sz.valid >= n.valid && sz.test >= n.test) break;
    }
    DatasetSpec s;
    s.source = src;
    s.algorithm = std::string(kNatural);
    s.count = count;
    s.seed = derive_seed(config.seed, "dataset:" + natural_key(src));
    out.push_back(std::move(s));
  }
  return out;
}

Workspace prepare_workspace(const ExperimentConfig& config) {
  Workspace ws;
  std::set<std::string> used;
  for (const auto* list : {&config.train, &config.test}) {
    for (const auto& s : *list) used.insert(s.source);
  }
  for (const auto& name : used) {
    const auto& src = config.sources.at(name);
    std::vector<std::string> lines;
    if (src.preset) {
      lines = synthesize_sentences(find_preset(*src.preset), src.sentences, derive_seed(config.seed, "corpus:" + name));
    } else {
      lines = lm::read_lines(*src.corpus);
    }
    std::vector<std::vector<std::string>> corpus;
    corpus.reserve(lines.size());
    for (const auto& l : lines) corpus.push_back(lm::tokenize(l, config.lm.lowercase));
    ws.models.emplace(name, lm::train_ngram(corpus, config.lm));
    ws.lm_corpora.emplace(name, std::move(lines));
  }

  std::vector<DatasetSpec> specs = natural_specs(config);
  std::set<std::string> keys;
  for (const auto* list : {&config.train, &config.test}) {
    for (const auto& s : *list) {
      if (keys.insert(s.key()).second) specs.push_back(s);
    }
  }
  for (const auto& spec : specs) {
    SplitDataset d;
    d.spec = spec;
    d.records = synthesize_dataset(ws.models.at(spec.source), spec, config.synthesis);
    // A single stratum: this is a seeded shuffle cut 3:1:1.
    const std::vector<std::string> strata(d.records.size(), spec.key());
    d.split = prompt::stratified_split(strata, derive_seed(config.seed, "split:" + spec.key()));
    ws.datasets.emplace(spec.key(), std::move(d));
  }
  return ws;
}

namespace {

const std::vector<std::size_t>& part_of(const prompt::SplitIndices& split, Part part) {
  switch (part) {
    case Part::Train: return split.train;
    case Part::Valid: return split.valid;
    case Part::Test: return split.test;
  }
  return split.test;
}

std::size_t part_size(const prompt::SplitSizes& sizes, Part part) {
  switch (part) {
    case Part::Train: return sizes.train;
    case Part::Valid: return sizes.valid;
    case Part::Test: return sizes.test;
  }
  return sizes.test;
}

}  // namespace

std::vector<const Record*> cell_records(const Workspace& ws, std::span<const DatasetSpec> specs, Part part) {
  std::vector<const Record*> out;
  std::map<std::string, std::size_t> cover_offset;
  for (const auto& spec : specs) {
    const auto& stego = ws.datasets.at(spec.key());
    const auto& natural = ws.datasets.at(natural_key(spec.source));
    const std::size_t n = part_size(prompt::split_sizes(spec.count), part);
    const auto& stego_idx = part_of(stego.split, part);
    const auto& cover_idx = part_of(natural.split, part);
    std::size_t& offset = cover_offset[spec.source];
    if (stego_idx.size() < n || cover_idx.size() < offset + n) {
      throw Error(ErrorCode::InvalidConfig, "not enough records to form cell " + spec.key());
    }
    for (std::size_t i = 0; i < n; ++i) out.push_back(&stego.records[stego_idx[i]]);
    for (std::size_t i = 0; i < n; ++i) out.push_back(&natural.records[cover_idx[offset + i]]);
    offset += n;
  }
  return out;
}

TrainedDetector train_on(const Workspace& ws, const std::string& name, std::span<const DatasetSpec> specs,
                         const detect::TrainConfig& config) {
  const auto records = cell_records(ws, specs, Part::Train);
  std::vector<features::SentenceFeatures> covers;
  for (const auto* r : records) {
    if (r->label == Label::Cover) covers.push_back(r->features);
  }
  const auto stats = features::fit_cover_stats(covers);
  std::vector<detect::Sample> samples;
  samples.reserve(records.size());
  for (const auto* r : records) {
    samples.push_back({detect::feature_vector(r->features, features::normalize(r->features, stats)), r->label});
  }
  auto detector = detect::train_detector(std::move(samples), config);
  detector.set_cover_stats(stats);
  return {name, std::move(detector)};
}

std::vector<features::ScatterRecord> score_records(const detect::FeatureDetector& detector,
                                                   std::span<const Record* const> records) {
  if (!detector.cover_stats()) throw Error(ErrorCode::InvalidConfig, "detector has no cover statistics");
  std::vector<features::ScatterRecord> out;
  out.reserve(records.size());
  for (const auto* r : records) {
    features::ScatterRecord s;
    s.id = r->id;
    s.label = r->label;
    s.algorithm = r->algorithm;
    s.source = r->source;
    s.features = r->features;
    s.z_score = features::normalize(r->features, *detector.cover_stats());
    s.verdict = detect::predict(detector, detect::feature_vector(r->features, *s.z_score)).label;
    out.push_back(std::move(s));
  }
  return out;
}

metrics::ConfusionCounts tally(std::span<const features::ScatterRecord> scored) {
  metrics::ConfusionCounts c;
  for (const auto& s : scored) c.add(metrics::classify(s.label, s.verdict));
  return c;
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
}

std::vector<prompt::InstructionRecord> instructions(std::vector<const Record*> records, int template_id,
                                                    std::uint64_t seed) {
  Rng rng(seed);
  for (std::size_t i = records.size(); i > 1; --i) std::swap(records[i - 1], records[rng.below(i)]);
  std::vector<prompt::InstructionRecord> out;
  out.reserve(records.size());
  for (const auto* r : records) {
    out.push_back(prompt::make_instruction({r->id, r->text, r->label, r->source, r->algorithm}, template_id));
  }
  return out;
}

void write_run(const ExperimentConfig& config, const fs::path& root, Report& report) {
  for (const char* sub : {"corpora", "features", "models", "reports", "exports", "prompts"}) {
    fs::create_directories(root / sub);
  }
  const Workspace ws = prepare_workspace(config);

  for (const auto& [name, model] : ws.models) {
    model.save(root / "models" / ("lm-" + name + ".model"));
    std::string text;
    for (const auto& l : ws.lm_corpora.at(name)) text += l + "\n";
    write_text(root / "corpora" / ("lm-" + name + ".txt"), text);
  }
  for (const auto& [key, d] : ws.datasets) {
    write_corpus(root / "corpora", d.spec, d.records);
    std::vector<features::ScatterRecord> rows;
    for (const auto& r : d.records) rows.push_back({r.id, r.label, r.algorithm, r.source, r.features, {}, {}});
    features::export_scatter(rows, root / "features" / (key + ".csv"));

    std::vector<features::SentenceFeatures> feats;
    for (const auto& r : d.records) feats.push_back(r.features);
    const auto stats = features::summarize(feats);
    report.datasets.push_back({key, d.spec.source, d.spec.algorithm, d.records.size(), d.split.train.size(),
                               d.split.valid.size(), d.split.test.size(), stats.mean_tokens, stats.mean_ppl});
  }

  // Prompt files for every stego cell, built from the same splits.
  std::set<std::string> prompt_keys;
  for (const auto* list : {&config.train, &config.test}) {
    for (const auto& s : *list) {
      if (!prompt_keys.insert(s.key()).second) continue;
      const fs::path dir = root / "prompts" / s.key();
      fs::create_directories(dir);
      const std::span<const DatasetSpec> one(&s, 1);
      const std::pair<Part, const char*> parts[] = {{Part::Train, "train"}, {Part::Valid, "valid"}, {Part::Test, "test"}};
      for (const auto& [part, name] : parts) {
        const auto recs = instructions(cell_records(ws, one, part), config.template_id,
                                       derive_seed(config.seed, "prompts:" + s.key() + ":" + name));
        prompt::write_records(dir / (std::string(name) + ".jsonl"), recs);
      }
    }
  }

  // Detectors: one per training cell, or a single one on the whole mix.
  std::vector<std::pair<std::string, std::vector<DatasetSpec>>> groups;
  if (config.mode == Mode::General) {
    groups.emplace_back("general", config.train);
  } else {
    for (const auto& s : config.train) groups.emplace_back(s.key(), std::vector<DatasetSpec>{s});
  }
  for (const auto& [name, specs] : groups) {
    const auto trained = train_on(ws, name, specs, config.detector);
    trained.detector.save(root / "models" / ("detector-" + name + ".txt"));

    const auto valid = cell_records(ws, specs, Part::Valid);
    if (!valid.empty()) report.validation.push_back({name, tally(score_records(trained.detector, valid))});

    for (const auto& t : config.test) {
      const std::span<const DatasetSpec> one(&t, 1);
      const auto scored = score_records(trained.detector, cell_records(ws, one, Part::Test));
      const std::string stem = name + "__" + t.key();
      features::export_scatter(scored, root / "features" / ("scored_" + stem + ".csv"));
      const std::string errors = "exports/errors_" + stem + ".csv";
      error_export(scored, root / errors);

      std::vector<LengthVerdict> lv;
      for (const auto& s : scored) lv.push_back({s.features.token_count, s.verdict == s.label});
      report.cells.push_back({name, t.key(), tally(scored), length_bucket_report(lv), errors});
    }
  }
}

std::vector<std::string> list_files(const fs::path& root) {
  std::vector<std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out.push_back(fs::relative(e.path(), root).generic_string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

Report run_experiment(const ExperimentConfig& config) {
  if (config.output_dir.empty()) throw Error(ErrorCode::InvalidConfig, "no output directory");
  const fs::path target = config.output_dir;
  if (fs::exists(target)) throw Error(ErrorCode::IoError, "run directory already exists: " + target.string());
  fs::path staging = target;
  staging += ".partial";
  fs::remove_all(staging);

  Report report;
  report.mode = std::string(to_string(config.mode));
  report.seed = config.seed;
  report.template_id = config.template_id;
  try {
    write_run(config, staging, report);
    // The report lists every other file of the run.
    report.exports = list_files(staging);
    write_text(staging / "reports" / "report.json", report_json(report));
    write_text(staging / "reports" / "report.txt", report_text(report));
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::rename(staging, target);
  } catch (...) {
    std::error_code ec;
    fs::remove_all(staging, ec);
    throw;
  }
  return report;
}

}  // namespace stegbench::bench
