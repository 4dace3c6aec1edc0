#include "stegbench/bench/records.hpp"

#include <cstdio>
#include <fstream>

#include "json.hpp"
#include "stegbench/codec/stego.hpp"
#include "stegbench/error.hpp"
#include "stegbench/rng.hpp"

namespace stegbench::bench {

using nlohmann::ordered_json;

std::string DatasetSpec::key() const { return source + "-" + algorithm; }

void DatasetSpec::validate() const {
  if (source.empty()) throw Error(ErrorCode::InvalidConfig, "dataset spec without a source");
  if (count < 1) throw Error(ErrorCode::InvalidConfig, "dataset " + key() + " needs count >= 1");
  if (natural()) {
    if (codec) throw Error(ErrorCode::InvalidConfig, "natural dataset " + key() + " cannot carry codec params");
    return;
  }
  try {
    codec::parse_algorithm(algorithm);
  } catch (const Error&) {
    throw Error(ErrorCode::InvalidConfig, "unknown algorithm in dataset spec: " + algorithm);
  }
}

namespace {

std::string record_id(const DatasetSpec& spec, std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%06zu", index);
  return spec.key() + "-" + buf;
}

Record make_record(const lm::NGramModel& model, const DatasetSpec& spec, std::size_t index,
                   std::vector<lm::TokenId> tokens) {
  Record r;
  r.id = record_id(spec, index);
  r.source = spec.source;
  r.algorithm = spec.algorithm;
  r.label = spec.natural() ? Label::Cover : Label::Stego;
  r.text = model.decode(tokens);
  r.features = features::extract_features(model, tokens);
  r.tokens = std::move(tokens);
  return r;
}

}  // namespace

std::vector<Record> synthesize_dataset(const lm::NGramModel& model, const DatasetSpec& spec,
                                       const SynthesisOptions& options) {
  spec.validate();
  if (options.max_attempts < 1) throw Error(ErrorCode::InvalidConfig, "max_attempts must be >= 1");
  codec::CodecParams params = spec.codec.value_or(codec::CodecParams{});
  if (!spec.natural()) {
    params.algorithm = codec::parse_algorithm(spec.algorithm);
    params.validate(model.vocab_size());
  }

  std::vector<Record> out;
  out.reserve(spec.count);
  for (std::size_t i = 0; i < spec.count; ++i) {
    bool done = false;
    for (int attempt = 0; attempt < options.max_attempts && !done; ++attempt) {
      const std::string tag = std::to_string(i) + ":" + std::to_string(attempt);
      const std::uint64_t seed = derive_seed(spec.seed, tag);
      if (spec.natural()) {
        auto tokens = codec::generate_cover(model, seed, params.max_tokens);
        if (tokens.empty()) continue;
        Record r = make_record(model, spec, i, std::move(tokens));
        r.seed = seed;
        out.push_back(std::move(r));
        done = true;
        continue;
      }
      Rng payload_rng(derive_seed(seed, "payload"));
      codec::Payload payload;
      payload.bits.resize(options.payload_bits);
      for (auto& b : payload.bits) b = payload_rng.bit() ? 1 : 0;
      params.rng_seed = derive_seed(seed, "codec");
      try {
        auto stego = codec::encode(model, payload, params);
        if (stego.tokens.empty()) continue;
        Record r = make_record(model, spec, i, std::move(stego.tokens));
        r.seed = params.rng_seed;
        r.payload_bits.reserve(payload.bits.size());
        for (auto b : payload.bits) r.payload_bits += b ? '1' : '0';
        r.embedded_bit_count = stego.embedded_bit_count;
        out.push_back(std::move(r));
        done = true;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::CapacityExceeded) throw;
      }
    }
    if (!done) {
      throw Error(ErrorCode::GenerationStalled,
                  spec.key() + ": sentence " + std::to_string(i) + " failed " +
                      std::to_string(options.max_attempts) + " attempts");
    }
  }
  return out;
}

namespace {

ordered_json codec_json(const codec::CodecParams& p) {
  ordered_json j;
  j["algorithm"] = std::string(codec::to_string(p.algorithm));
  j["flc_bits"] = p.flc_bits_per_step;
  j["hc_pool"] = p.hc_pool_size;
  j["ac_precision"] = p.ac_precision;
  j["ac_topk"] = p.ac_topk;
  j["adg_max_r"] = p.adg_max_r;
  j["max_tokens"] = p.max_tokens;
  return j;
}

}  // namespace

void write_corpus(const std::filesystem::path& dir, const DatasetSpec& spec, std::span<const Record> records) {
  std::filesystem::create_directories(dir);
  const auto text_path = dir / (spec.key() + ".txt");
  const auto meta_path = dir / (spec.key() + ".meta.jsonl");
  std::ofstream text(text_path, std::ios::binary);
  std::ofstream meta(meta_path, std::ios::binary);
  if (!text || !meta) throw Error(ErrorCode::IoError, "cannot write corpus " + spec.key());

  codec::CodecParams params = spec.codec.value_or(codec::CodecParams{});
  if (!spec.natural()) params.algorithm = codec::parse_algorithm(spec.algorithm);
  for (const auto& r : records) {
    text << r.text << '\n';
    ordered_json j;
    j["id"] = r.id;
    j["label"] = std::string(to_string(r.label));
    j["source"] = r.source;
    j["algorithm"] = r.algorithm;
    j["seed"] = r.seed;
    if (r.label == Label::Stego) {
      j["params"] = codec_json(params);
      j["embedded_bit_count"] = r.embedded_bit_count;
      j["payload_bits"] = r.payload_bits;
    }
    j["token_count"] = r.features.token_count;
    meta << j.dump() << '\n';
  }
  if (!text || !meta) throw Error(ErrorCode::IoError, "write failed for corpus " + spec.key());
}

}  // namespace stegbench::bench
