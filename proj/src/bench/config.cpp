#include "stegbench/bench/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "stegbench/bench/synthetic.hpp"
#include "stegbench/error.hpp"
#include "stegbench/prompt/templates.hpp"
#include "stegbench/rng.hpp"

namespace stegbench::bench {

using nlohmann::json;

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::DomainSpecific: return "domain_specific";
    case Mode::DomainAgnostic: return "domain_agnostic";
    case Mode::General: return "general";
  }
  return "?";
}

Mode parse_mode(std::string_view name) {
  for (Mode m : {Mode::DomainSpecific, Mode::DomainAgnostic, Mode::General}) {
    if (to_string(m) == name) return m;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown mode: " + std::string(name));
}

std::vector<DatasetSpec> default_general_train() {
  return {{"movie", "ac", 10000, 0, std::nullopt}, {"tweet", "hc", 5000, 0, std::nullopt}};
}

std::vector<DatasetSpec> default_general_test() {
  std::vector<DatasetSpec> out;
  for (const char* algo : {"ac", "hc", "adg"}) out.push_back({"news", algo, 1000, 0, std::nullopt});
  out.push_back({"movie", "hc", 1000, 0, std::nullopt});
  out.push_back({"tweet", "ac", 1000, 0, std::nullopt});
  return out;
}

namespace {

void check_keys(const json& j, std::initializer_list<std::string_view> allowed, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, where + " must be an object");
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || a == k;
    if (!ok) throw Error(ErrorCode::InvalidConfig, "unknown key '" + k + "' in " + where);
  }
}

codec::CodecParams parse_codec(const json& j, codec::CodecParams p, const std::string& where) {
  check_keys(j, {"flc_bits", "hc_pool", "ac_precision", "ac_topk", "adg_max_r", "max_tokens"}, where);
  p.flc_bits_per_step = j.value("flc_bits", p.flc_bits_per_step);
  p.hc_pool_size = j.value("hc_pool", p.hc_pool_size);
  p.ac_precision = j.value("ac_precision", p.ac_precision);
  p.ac_topk = j.value("ac_topk", p.ac_topk);
  p.adg_max_r = j.value("adg_max_r", p.adg_max_r);
  p.max_tokens = j.value("max_tokens", p.max_tokens);
  return p;
}

// Seeds left out of the file are derived from the run seed and the key.
std::vector<DatasetSpec> parse_specs(const json& j, const codec::CodecParams& base, std::uint64_t run_seed,
                                     const std::string& where) {
  if (!j.is_array()) throw Error(ErrorCode::InvalidConfig, where + " must be an array");
  std::vector<DatasetSpec> out;
  for (const auto& item : j) {
    check_keys(item, {"source", "algorithm", "count", "seed", "codec"}, where + " entry");
    DatasetSpec s;
    s.source = item.at("source").get<std::string>();
    s.algorithm = item.at("algorithm").get<std::string>();
    for (auto& c : s.algorithm) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    s.count = item.at("count").get<std::size_t>();
    s.seed = item.contains("seed") ? item["seed"].get<std::uint64_t>() : derive_seed(run_seed, "dataset:" + s.key());
    if (item.contains("codec")) {
      s.codec = parse_codec(item["codec"], base, where + " codec");
    } else if (s.algorithm != kNatural) {
      s.codec = base;
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  ExperimentConfig cfg;
  try {
    const json j = json::parse(text);
    check_keys(j, {"mode", "seed", "template_id", "provider", "output_dir", "lm", "sources", "codec", "payload_bits",
                   "max_attempts", "train", "test", "detector", "adapter"},
               "config");
    cfg.mode = parse_mode(j.at("mode").get<std::string>());
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.template_id = j.value("template_id", 2);
    cfg.provider = j.value("provider", std::string("ngram"));
    if (j.contains("output_dir")) cfg.output_dir = base_dir / j["output_dir"].get<std::string>();
    if (j.contains("lm")) {
      const auto& l = j["lm"];
      check_keys(l, {"order", "smoothing_k", "min_count", "lowercase"}, "lm");
      cfg.lm.order = l.value("order", cfg.lm.order);
      cfg.lm.smoothing_k = l.value("smoothing_k", cfg.lm.smoothing_k);
      cfg.lm.min_count = l.value("min_count", cfg.lm.min_count);
      cfg.lm.lowercase = l.value("lowercase", cfg.lm.lowercase);
    }
    if (j.contains("sources")) {
      if (!j["sources"].is_object()) throw Error(ErrorCode::InvalidConfig, "sources must be an object");
      for (const auto& [name, s] : j["sources"].items()) {
        check_keys(s, {"preset", "sentences", "corpus"}, "source " + name);
        SourceConfig sc;
        if (s.contains("preset")) sc.preset = s["preset"].get<std::string>();
        sc.sentences = s.value("sentences", sc.sentences);
        if (s.contains("corpus")) sc.corpus = base_dir / s["corpus"].get<std::string>();
        cfg.sources[name] = std::move(sc);
      }
    }
    if (j.contains("codec")) cfg.codec = parse_codec(j["codec"], cfg.codec, "codec");
    cfg.synthesis.payload_bits = j.value("payload_bits", cfg.synthesis.payload_bits);
    cfg.synthesis.max_attempts = j.value("max_attempts", cfg.synthesis.max_attempts);
    if (j.contains("train")) cfg.train = parse_specs(j["train"], cfg.codec, cfg.seed, "train");
    if (j.contains("test")) cfg.test = parse_specs(j["test"], cfg.codec, cfg.seed, "test");
    if (j.contains("detector")) {
      const auto& d = j["detector"];
      check_keys(d, {"learning_rate", "epochs", "l2", "seed"}, "detector");
      cfg.detector.learning_rate = d.value("learning_rate", cfg.detector.learning_rate);
      cfg.detector.epochs = d.value("epochs", cfg.detector.epochs);
      cfg.detector.l2 = d.value("l2", cfg.detector.l2);
      cfg.detector.seed = d.value("seed", cfg.detector.seed);
    }
    if (j.contains("adapter")) {
      const auto& a = j["adapter"];
      check_keys(a, {"finetune", "infer"}, "adapter");
      cfg.adapter = AdapterConfig{a.value("finetune", std::string()), a.value("infer", std::string())};
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("config: ") + e.what());
  }
  cfg.finalize();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

void ExperimentConfig::finalize() {
  if (provider != "ngram") throw Error(ErrorCode::InvalidConfig, "unsupported provider: " + provider);
  prompt::get_template(template_id);
  detector.validate();
  if (lm.order < 1 || lm.smoothing_k <= 0.0 || lm.min_count < 1) throw Error(ErrorCode::InvalidConfig, "invalid lm settings");
  if (synthesis.max_attempts < 1) throw Error(ErrorCode::InvalidConfig, "max_attempts must be >= 1");

  if (sources.empty()) {
    for (const auto& p : presets()) sources[p.name] = SourceConfig{p.name, 3000, std::nullopt};
  }
  for (const auto& [name, s] : sources) {
    if (s.preset.has_value() == s.corpus.has_value()) {
      throw Error(ErrorCode::InvalidConfig, "source " + name + " needs exactly one of preset or corpus");
    }
    if (s.preset) find_preset(*s.preset);
    if (s.sentences < 1) throw Error(ErrorCode::InvalidConfig, "source " + name + " needs sentences >= 1");
  }

  auto fill = [&](std::vector<DatasetSpec> defaults) {
    for (auto& s : defaults) {
      s.codec = codec;
      s.seed = derive_seed(seed, "dataset:" + s.key());
    }
    return defaults;
  };
  if (mode == Mode::General) {
    if (train.empty()) train = fill(default_general_train());
    if (test.empty()) test = fill(default_general_test());
  }
  if (mode == Mode::DomainSpecific && test.empty()) test = train;
  if (train.empty()) throw Error(ErrorCode::InvalidConfig, "no training datasets");
  if (test.empty()) throw Error(ErrorCode::InvalidConfig, "no test datasets");

  // One dataset per key: specs sharing a key must agree on codec and seed.
  std::map<std::string, const DatasetSpec*> seen;
  for (const auto* list : {&train, &test}) {
    std::set<std::string> in_list;
    for (const auto& s : *list) {
      s.validate();
      if (s.natural()) {
        throw Error(ErrorCode::InvalidConfig, "train/test entries name stego datasets; covers are paired automatically (" + s.key() + ")");
      }
      if (!sources.count(s.source)) throw Error(ErrorCode::InvalidConfig, "unknown source: " + s.source);
      if (!in_list.insert(s.key()).second) throw Error(ErrorCode::InvalidConfig, "duplicate dataset " + s.key());
      auto [it, fresh] = seen.emplace(s.key(), &s);
      if (!fresh && (it->second->codec != s.codec || it->second->seed != s.seed)) {
        throw Error(ErrorCode::InvalidConfig, "dataset " + s.key() + " is declared with different codec or seed");
      }
    }
  }
  if (mode == Mode::DomainAgnostic) {
    for (const auto& t : train) {
      for (const auto& u : test) {
        if (t.key() == u.key()) {
          throw Error(ErrorCode::InvalidConfig, "domain_agnostic needs disjoint train/test cells; both contain " + t.key());
        }
      }
    }
  }
}

}  // namespace stegbench::bench
