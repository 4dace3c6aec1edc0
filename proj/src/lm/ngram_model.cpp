#include "stegbench/lm/ngram_model.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "stegbench/error.hpp"
#include "stegbench/lm/tokenizer.hpp"

namespace stegbench::lm {

namespace {

constexpr std::string_view kMagic = "stegbench-ngram";
constexpr int kFormatVersion = 1;

void check_config(const NGramConfig& config) {
  if (config.order < 1) throw Error(ErrorCode::InvalidConfig, "order must be >= 1");
  if (!(config.smoothing_k > 0.0)) throw Error(ErrorCode::InvalidConfig, "smoothing_k must be > 0");
  if (config.min_count < 1) throw Error(ErrorCode::InvalidConfig, "min_count must be >= 1");
}

std::string hex_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw Error(ErrorCode::FormatError, "bad real '" + s + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& s) {
  char* end = nullptr;
  const auto v = std::strtoull(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0') throw Error(ErrorCode::FormatError, "bad integer '" + s + "'");
  return v;
}

std::string expect_line(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::FormatError, "unexpected end of model file");
  return line;
}

std::string expect_field(std::istream& in, std::string_view key) {
  const std::string line = expect_line(in);
  const auto sp = line.find(' ');
  if (sp == std::string::npos || std::string_view(line).substr(0, sp) != key) {
    throw Error(ErrorCode::FormatError, "expected '" + std::string(key) + "', got '" + line + "'");
  }
  return line.substr(sp + 1);
}

}  // namespace

std::size_t ContextHash::operator()(const std::vector<TokenId>& key) const noexcept {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (TokenId t : key) {
    h ^= t;
    h *= 0x100000001b3ULL;
  }
  return h;
}

NGramModel::NGramModel(NGramConfig config, Vocabulary vocab, std::vector<Table> tables)
    : config_(config), vocab_(std::move(vocab)), tables_(std::move(tables)) {
  check_config(config_);
  if (tables_.size() != static_cast<std::size_t>(config_.order)) {
    throw Error(ErrorCode::FormatError, "table count does not match order");
  }
  auto root = tables_[0].find({});
  if (root == tables_[0].end() || root->second.total == 0) {
    throw Error(ErrorCode::TrainingDataEmpty, "model has no unigram counts");
  }
  const std::size_t predictable = vocab_.size() - 1;
  const double k = config_.smoothing_k;
  const double denom = static_cast<double>(root->second.total) + k * static_cast<double>(predictable);
  unigram_.assign(predictable, k / denom);
  for (const auto& [tok, count] : root->second.next) {
    if (tok == kBos || tok >= vocab_.size()) throw Error(ErrorCode::FormatError, "bad unigram token id");
    unigram_[tok - 1] = (static_cast<double>(count) + k) / denom;
  }
}

ConditionalDistribution NGramModel::next(std::span<const TokenId> context) const {
  for (TokenId t : context) {
    if (!vocab_.contains(t)) {
      throw Error(ErrorCode::UnknownToken, "context token " + std::to_string(t) + " outside vocabulary");
    }
  }
  const int n = config_.order;
  const std::size_t predictable = vocab_.size() - 1;
  const double k = config_.smoothing_k;
  const double kv = k * static_cast<double>(predictable);

  // Last n-1 tokens of the BOS-padded history.
  std::vector<TokenId> history(static_cast<std::size_t>(n - 1), kBos);
  const std::size_t take = std::min(context.size(), history.size());
  std::copy(context.end() - static_cast<std::ptrdiff_t>(take), context.end(), history.end() - static_cast<std::ptrdiff_t>(take));

  std::vector<const ContextCounts*> observed(static_cast<std::size_t>(n), nullptr);
  observed[0] = &tables_[0].find({})->second;
  double weight_total = static_cast<double>(observed[0]->total);
  std::vector<TokenId> key;
  for (int m = 2; m <= n; ++m) {
    key.assign(history.end() - (m - 1), history.end());
    auto it = tables_[static_cast<std::size_t>(m - 1)].find(key);
    if (it != tables_[static_cast<std::size_t>(m - 1)].end() && it->second.total > 0) {
      observed[static_cast<std::size_t>(m - 1)] = &it->second;
      weight_total += static_cast<double>(it->second.total);
    }
  }

  std::vector<double> probs(predictable);
  const double lambda1 = static_cast<double>(observed[0]->total) / weight_total;
  for (std::size_t i = 0; i < predictable; ++i) probs[i] = lambda1 * unigram_[i];
  for (int m = 2; m <= n; ++m) {
    const ContextCounts* counts = observed[static_cast<std::size_t>(m - 1)];
    if (counts == nullptr) continue;
    const double lambda = static_cast<double>(counts->total) / weight_total;
    const double denom = static_cast<double>(counts->total) + kv;
    const double floor_mass = lambda * k / denom;
    for (auto& p : probs) p += floor_mass;
    for (const auto& [tok, count] : counts->next) {
      probs[tok - 1] += lambda * static_cast<double>(count) / denom;
    }
  }

  std::vector<Entry> entries(predictable);
  for (std::size_t i = 0; i < predictable; ++i) {
    entries[i] = Entry{static_cast<TokenId>(i + 1), probs[i]};
  }
  return ConditionalDistribution(std::move(entries));
}

std::vector<TokenId> NGramModel::encode(std::string_view sentence) const {
  std::vector<TokenId> ids;
  for (const auto& tok : tokenize(sentence, config_.lowercase)) ids.push_back(vocab_.lookup(tok));
  return ids;
}

std::string NGramModel::decode(std::span<const TokenId> tokens) const {
  std::string out;
  for (TokenId t : tokens) {
    if (!out.empty()) out += ' ';
    out += vocab_.surface(t);
  }
  return out;
}

void NGramModel::save(std::ostream& out) const {
  out << kMagic << ' ' << kFormatVersion << '\n';
  out << "order " << config_.order << '\n';
  out << "smoothing_k " << hex_double(config_.smoothing_k) << '\n';
  out << "min_count " << config_.min_count << '\n';
  out << "lowercase " << (config_.lowercase ? 1 : 0) << '\n';
  out << "vocab " << vocab_.size() << '\n';
  for (std::size_t id = kFirstWordId; id < vocab_.size(); ++id) out << vocab_.tokens()[id] << '\n';
  for (std::size_t m = 0; m < tables_.size(); ++m) {
    std::map<std::vector<TokenId>, const ContextCounts*> sorted;
    for (const auto& [ctx, counts] : tables_[m]) sorted.emplace(ctx, &counts);
    out << "table " << (m + 1) << ' ' << sorted.size() << '\n';
    for (const auto& [ctx, counts] : sorted) {
      for (std::size_t i = 0; i < ctx.size(); ++i) out << (i ? " " : "") << ctx[i];
      out << '|';
      for (std::size_t i = 0; i < counts->next.size(); ++i) {
        out << (i ? " " : "") << counts->next[i].first << ':' << counts->next[i].second;
      }
      out << '\n';
    }
  }
  out << "end\n";
}

void NGramModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  save(out);
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

NGramModel NGramModel::load(std::istream& in) {
  {
    std::istringstream header(expect_line(in));
    std::string magic;
    int version = 0;
    header >> magic >> version;
    if (magic != kMagic || version != kFormatVersion) {
      throw Error(ErrorCode::FormatError, "not a stegbench n-gram model (v1)");
    }
  }
  NGramConfig config;
  config.order = static_cast<int>(parse_u64(expect_field(in, "order")));
  config.smoothing_k = parse_double(expect_field(in, "smoothing_k"));
  config.min_count = static_cast<int>(parse_u64(expect_field(in, "min_count")));
  config.lowercase = parse_u64(expect_field(in, "lowercase")) != 0;
  check_config(config);
  const auto vocab_size = parse_u64(expect_field(in, "vocab"));
  if (vocab_size < kFirstWordId) throw Error(ErrorCode::FormatError, "vocabulary too small");
  Vocabulary vocab;
  for (std::uint64_t id = kFirstWordId; id < vocab_size; ++id) {
    const std::string surface = expect_line(in);
    if (vocab.add(surface) != id) throw Error(ErrorCode::FormatError, "duplicate vocabulary entry " + surface);
  }
  std::vector<Table> tables(static_cast<std::size_t>(config.order));
  for (int m = 1; m <= config.order; ++m) {
    std::istringstream header(expect_field(in, "table"));
    int order = 0;
    std::size_t rows = 0;
    header >> order >> rows;
    if (order != m) throw Error(ErrorCode::FormatError, "tables out of order");
    auto& table = tables[static_cast<std::size_t>(m - 1)];
    table.reserve(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      const std::string line = expect_line(in);
      const auto bar = line.find('|');
      if (bar == std::string::npos) throw Error(ErrorCode::FormatError, "missing '|' in count row");
      std::vector<TokenId> ctx;
      {
        std::istringstream cs(line.substr(0, bar));
        std::string tok;
        while (cs >> tok) ctx.push_back(static_cast<TokenId>(parse_u64(tok)));
      }
      if (ctx.size() != static_cast<std::size_t>(m - 1)) throw Error(ErrorCode::FormatError, "context length mismatch");
      ContextCounts counts;
      std::istringstream ns(line.substr(bar + 1));
      std::string pair;
      while (ns >> pair) {
        const auto colon = pair.find(':');
        if (colon == std::string::npos) throw Error(ErrorCode::FormatError, "bad count pair " + pair);
        const auto tok = static_cast<TokenId>(parse_u64(pair.substr(0, colon)));
        const auto count = parse_u64(pair.substr(colon + 1));
        if (tok >= vocab_size || tok == kBos) throw Error(ErrorCode::FormatError, "count for invalid token");
        counts.next.emplace_back(tok, count);
        counts.total += count;
      }
      if (!std::is_sorted(counts.next.begin(), counts.next.end())) {
        throw Error(ErrorCode::FormatError, "count row not sorted by token id");
      }
      table.emplace(std::move(ctx), std::move(counts));
    }
  }
  if (expect_line(in) != "end") throw Error(ErrorCode::FormatError, "missing end marker");
  return NGramModel(config, std::move(vocab), std::move(tables));
}

NGramModel NGramModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return load(in);
}

NGramModel train_ngram(const std::vector<std::vector<std::string>>& corpus, const NGramConfig& config) {
  check_config(config);
  std::vector<const std::vector<std::string>*> sentences;
  for (const auto& s : corpus) {
    if (!s.empty()) sentences.push_back(&s);
  }
  if (sentences.empty()) throw Error(ErrorCode::TrainingDataEmpty, "corpus has no tokens");

  auto fold = [&](const std::string& tok) {
    if (!config.lowercase) return tok;
    std::string out = tok;
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
  };

  std::map<std::string, std::uint64_t> freq;
  for (const auto* s : sentences) {
    for (const auto& tok : *s) ++freq[fold(tok)];
  }
  std::vector<std::pair<std::string, std::uint64_t>> kept;
  for (const auto& [tok, count] : freq) {
    if (count >= static_cast<std::uint64_t>(config.min_count) && tok != kBosSurface && tok != kEosSurface &&
        tok != kUnkSurface) {
      kept.emplace_back(tok, count);
    }
  }
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  Vocabulary vocab;
  for (const auto& [tok, count] : kept) vocab.add(tok);

  const auto n = static_cast<std::size_t>(config.order);
  std::vector<std::unordered_map<std::vector<TokenId>, std::map<TokenId, std::uint64_t>, ContextHash>> raw(n);
  std::vector<TokenId> padded;
  for (const auto* s : sentences) {
    padded.assign(n - 1, kBos);
    for (const auto& tok : *s) padded.push_back(vocab.lookup(fold(tok)));
    padded.push_back(kEos);
    for (std::size_t pos = n - 1; pos < padded.size(); ++pos) {
      for (std::size_t m = 1; m <= n; ++m) {
        std::vector<TokenId> ctx(padded.begin() + static_cast<std::ptrdiff_t>(pos - (m - 1)),
                                 padded.begin() + static_cast<std::ptrdiff_t>(pos));
        ++raw[m - 1][std::move(ctx)][padded[pos]];
      }
    }
  }

  std::vector<NGramModel::Table> tables(n);
  for (std::size_t m = 0; m < n; ++m) {
    tables[m].reserve(raw[m].size());
    for (auto& [ctx, next] : raw[m]) {
      ContextCounts counts;
      for (const auto& [tok, count] : next) {
        counts.next.emplace_back(tok, count);
        counts.total += count;
      }
      tables[m].emplace(ctx, std::move(counts));
    }
  }
  return NGramModel(config, std::move(vocab), std::move(tables));
}

}  // namespace stegbench::lm
