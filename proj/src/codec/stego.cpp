#include "stegbench/codec/stego.hpp"

#include <cmath>

#include "stegbench/codec/huffman.hpp"
#include "stegbench/error.hpp"

namespace stegbench::codec {

using lm::ConditionalDistribution;
using lm::Entry;
using lm::TokenId;

std::optional<std::size_t> StepCodebook::find(TokenId token) const {
  if (algorithm == Algorithm::AC) {
    for (std::size_t i = 0; i < intervals.size(); ++i) {
      if (intervals[i].token == token) return i;
    }
    return std::nullopt;
  }
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (pool[i].token == token) return i;
  }
  return std::nullopt;
}

namespace {

std::vector<Bits> fixed_length_codes(std::size_t count, int bits) {
  std::vector<Bits> codes(count);
  for (std::size_t i = 0; i < count; ++i) {
    for (int b = bits - 1; b >= 0; --b) codes[i].push_back(static_cast<std::uint8_t>((i >> b) & 1U));
  }
  return codes;
}

std::vector<Entry> truncate_renormalized(std::vector<Entry> pool, std::size_t k) {
  if (k == 0 || k >= pool.size()) return pool;
  pool.resize(k);
  double mass = 0.0;
  for (const auto& e : pool) mass += e.prob;
  for (auto& e : pool) e.prob /= mass;
  return pool;
}

// Walks the prefix code with bits starting at `pos`; returns the pool index.
std::size_t select_by_prefix(const std::vector<Bits>& codes, const PaddedBits& bits, std::size_t pos) {
  std::vector<std::size_t> alive(codes.size());
  for (std::size_t i = 0; i < codes.size(); ++i) alive[i] = i;
  for (std::size_t depth = 0;; ++depth) {
    for (std::size_t i : alive) {
      if (codes[i].size() == depth) return i;
    }
    const auto bit = bits.at(pos + depth);
    std::vector<std::size_t> next;
    for (std::size_t i : alive) {
      if (codes[i][depth] == bit) next.push_back(i);
    }
    if (next.empty()) throw Error(ErrorCode::InvalidParams, "incomplete prefix code");
    alive = std::move(next);
  }
}

}  // namespace

StepCodebook build_codebook(const ConditionalDistribution& dist, const CodecParams& params,
                            const ArithmeticState* interval) {
  StepCodebook cb;
  cb.algorithm = params.algorithm;
  cb.pool = lm::ranked(dist);
  if (cb.pool.empty()) throw Error(ErrorCode::InvalidParams, "empty distribution");
  switch (params.algorithm) {
    case Algorithm::FLC: {
      const std::size_t size = std::size_t{1} << params.flc_bits_per_step;
      if (size > cb.pool.size()) {
        throw Error(ErrorCode::InvalidParams, "FLC pool of " + std::to_string(size) + " exceeds " +
                                                  std::to_string(cb.pool.size()) + " candidates");
      }
      cb.pool.resize(size);
      cb.codes = fixed_length_codes(size, params.flc_bits_per_step);
      break;
    }
    case Algorithm::HC:
      if (cb.pool.size() > static_cast<std::size_t>(params.hc_pool_size)) {
        cb.pool.resize(static_cast<std::size_t>(params.hc_pool_size));
      }
      cb.codes = huffman_codes(cb.pool);
      break;
    case Algorithm::ADG:
      cb.grouping = adg_group(cb.pool, params.adg_max_r);
      break;
    case Algorithm::AC: {
      if (interval == nullptr) throw Error(ErrorCode::InvalidParams, "AC codebook needs the coding interval");
      cb.pool = truncate_renormalized(std::move(cb.pool), static_cast<std::size_t>(params.ac_topk));
      cb.intervals = partition_interval(cb.pool, interval->lo(), interval->hi());
      break;
    }
  }
  return cb;
}

ConditionalDistribution embedding_distribution(const lm::DistributionProvider& provider,
                                               std::span<const TokenId> context) {
  auto dist = provider.next(context);
  if (dist.prob(lm::kEos) > 0.0) return lm::without_token(dist, lm::kEos);
  return dist;
}

TokenId sample_token(const ConditionalDistribution& dist, Rng& rng) {
  const auto& entries = dist.entries();
  if (entries.empty()) throw Error(ErrorCode::InvalidParams, "cannot sample from an empty distribution");
  const double target = rng.uniform() * dist.total();
  double acc = 0.0;
  for (const auto& e : entries) {
    acc += e.prob;
    if (target < acc) return e.token;
  }
  return entries.back().token;
}

StegoText encode(const lm::DistributionProvider& provider, const Payload& payload, const CodecParams& params) {
  params.validate(provider.vocab_size());
  const Bits framed = frame(payload);
  const PaddedBits bits(framed);
  Rng rng(params.rng_seed);

  StegoText out;
  out.algorithm = params.algorithm;
  out.params = params;
  std::vector<TokenId> context{lm::kBos};
  ArithmeticState interval(params.algorithm == Algorithm::AC ? params.ac_precision : 64);
  std::size_t consumed = 0;

  while (consumed < framed.size()) {
    if (out.tokens.size() >= params.max_tokens) {
      throw Error(ErrorCode::CapacityExceeded, "embedded " + std::to_string(consumed) + " of " +
                                                   std::to_string(framed.size()) + " bits in " +
                                                   std::to_string(params.max_tokens) + " tokens");
    }
    const auto dist = embedding_distribution(provider, context);
    const auto cb = build_codebook(dist, params, &interval);
    TokenId token = 0;
    switch (params.algorithm) {
      case Algorithm::FLC:
      case Algorithm::HC: {
        const std::size_t idx = select_by_prefix(cb.codes, bits, consumed);
        token = cb.pool[idx].token;
        consumed += cb.codes[idx].size();
        break;
      }
      case Algorithm::ADG: {
        const int r = cb.grouping.bits;
        const auto group = static_cast<int>(bits.read(consumed, r));
        token = sample_in_group(cb.pool, cb.grouping, group, rng);
        consumed += static_cast<std::size_t>(r);
        break;
      }
      case Algorithm::AC: {
        u128 window = 0;
        for (int i = 0; i < params.ac_precision; ++i) window = (window << 1) | bits.at(consumed + static_cast<std::size_t>(i));
        const Subinterval* chosen = nullptr;
        for (const auto& sub : cb.intervals) {
          if (sub.lo <= window && window < sub.hi) {
            chosen = &sub;
            break;
          }
        }
        if (chosen == nullptr) throw Error(ErrorCode::DesyncError, "message window outside coding interval");
        token = chosen->token;
        consumed += interval.narrow(*chosen);
        break;
      }
    }
    out.tokens.push_back(token);
    context.push_back(token);
  }
  out.embedded_bit_count = consumed;
  out.embedding_tokens = out.tokens.size();

  while (out.tokens.size() < params.max_tokens) {
    const TokenId token = sample_token(provider.next(context), rng);
    if (token == lm::kEos) {
      out.ended_with_eos = true;
      break;
    }
    out.tokens.push_back(token);
    context.push_back(token);
  }
  return out;
}

Payload decode(const lm::DistributionProvider& provider, std::span<const TokenId> tokens,
               const CodecParams& params) {
  params.validate(provider.vocab_size());
  Bits recovered;
  std::size_t needed = kHeaderBits;
  bool header_known = false;
  std::vector<TokenId> context{lm::kBos};
  ArithmeticState interval(params.algorithm == Algorithm::AC ? params.ac_precision : 64);

  std::size_t step = 0;
  while (recovered.size() < needed) {
    if (step >= tokens.size()) {
      throw Error(ErrorCode::TruncatedStego, "recovered " + std::to_string(recovered.size()) + " of " +
                                                 std::to_string(needed) + (header_known ? "" : "+") +
                                                 " bits before the tokens ran out");
    }
    const TokenId token = tokens[step];
    const auto dist = embedding_distribution(provider, context);
    const auto cb = build_codebook(dist, params, &interval);
    const auto idx = cb.find(token);
    if (!idx) {
      throw Error(ErrorCode::DesyncError, "token " + std::to_string(token) + " at step " + std::to_string(step) +
                                              " is not a candidate");
    }
    switch (params.algorithm) {
      case Algorithm::FLC:
      case Algorithm::HC:
        recovered.insert(recovered.end(), cb.codes[*idx].begin(), cb.codes[*idx].end());
        break;
      case Algorithm::ADG: {
        const int r = cb.grouping.bits;
        const int group = cb.grouping.group_of[*idx];
        for (int b = r - 1; b >= 0; --b) recovered.push_back(static_cast<std::uint8_t>((group >> b) & 1));
        break;
      }
      case Algorithm::AC:
        interval.narrow(cb.intervals[*idx], &recovered);
        break;
    }
    context.push_back(token);
    ++step;
    if (!header_known && recovered.size() >= kHeaderBits) {
      header_known = true;
      needed = kHeaderBits + read_header(recovered);
    }
  }
  Payload out;
  out.bits.assign(recovered.begin() + static_cast<std::ptrdiff_t>(kHeaderBits),
                  recovered.begin() + static_cast<std::ptrdiff_t>(needed));
  return out;
}

std::vector<TokenId> generate_cover(const lm::DistributionProvider& provider, std::uint64_t seed,
                                    std::size_t max_tokens) {
  if (max_tokens < 1) throw Error(ErrorCode::InvalidParams, "max_tokens must be >= 1");
  Rng rng(seed);
  std::vector<TokenId> context{lm::kBos};
  std::vector<TokenId> out;
  while (out.size() < max_tokens) {
    const TokenId token = sample_token(provider.next(context), rng);
    if (token == lm::kEos) break;
    out.push_back(token);
    context.push_back(token);
  }
  return out;
}

double step_capacity(Algorithm algorithm, const ConditionalDistribution& dist, const CodecParams& params) {
  CodecParams p = params;
  p.algorithm = algorithm;
  switch (algorithm) {
    case Algorithm::FLC:
      return static_cast<double>(p.flc_bits_per_step);
    case Algorithm::ADG:
      return static_cast<double>(build_codebook(dist, p).grouping.bits);
    case Algorithm::HC: {
      const auto cb = build_codebook(dist, p);
      double mass = 0.0;
      double weighted = 0.0;
      for (std::size_t i = 0; i < cb.pool.size(); ++i) {
        mass += cb.pool[i].prob;
        weighted += cb.pool[i].prob * static_cast<double>(cb.codes[i].size());
      }
      return weighted / mass;
    }
    case Algorithm::AC: {
      auto pool = truncate_renormalized(lm::ranked(dist), static_cast<std::size_t>(p.ac_topk));
      double h = 0.0;
      for (const auto& e : pool) h -= e.prob * std::log2(e.prob);
      return h;
    }
  }
  return 0.0;
}

}  // namespace stegbench::codec
