#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "stegbench/error.hpp"
#include "stegbench/lm/distribution.hpp"
#include "stegbench/lm/ngram_model.hpp"
#include "stegbench/lm/tokenizer.hpp"

namespace testsupport {

using stegbench::lm::ConditionalDistribution;
using stegbench::lm::Entry;
using stegbench::lm::TokenId;

// Provider backed by a callback, for hand-built distributions.
class FnProvider : public stegbench::lm::DistributionProvider {
 public:
  FnProvider(std::size_t vocab, std::function<ConditionalDistribution(std::span<const TokenId>)> fn)
      : vocab_(vocab), fn_(std::move(fn)) {}
  ConditionalDistribution next(std::span<const TokenId> context) const override { return fn_(context); }
  std::size_t vocab_size() const override { return vocab_; }

 private:
  std::size_t vocab_;
  std::function<ConditionalDistribution(std::span<const TokenId>)> fn_;
};

// Error code thrown by `fn`; fails the calling check when nothing is thrown.
inline std::optional<stegbench::ErrorCode> code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const stegbench::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

inline std::vector<std::vector<std::string>> split_all(const std::vector<std::string>& lines) {
  std::vector<std::vector<std::string>> out;
  for (const auto& l : lines) out.push_back(stegbench::lm::tokenize(l));
  return out;
}

// A few dozen sentences with enough repetition for the 3-gram tables to
// matter and enough variety for every codec to have choices.
inline std::vector<std::string> toy_lines() {
  return {
      "the cat sat on the mat",
      "the dog sat on the log",
      "a cat saw a dog",
      "the dog saw the cat on the mat",
      "a bird sang in the tree",
      "the bird sat in the tree",
      "a dog ran to the park",
      "the cat ran to the tree",
      "we saw the bird in the park",
      "the mat was red and the log was brown",
      "a red bird and a brown dog",
      "the cat and the dog sat in the park",
      "we ran and we sang",
      "the tree was tall",
      "a tall tree in a green park",
      "the green mat sat in the sun",
      "a dog slept in the sun",
      "the cat slept on the red mat",
      "we slept in the park under the tree",
      "the brown dog ran under the tall tree",
  };
}

inline stegbench::lm::NGramModel toy_model(int order = 3, double k = 0.1) {
  stegbench::lm::NGramConfig cfg;
  cfg.order = order;
  cfg.smoothing_k = k;
  return stegbench::lm::train_ngram(split_all(toy_lines()), cfg);
}

}  // namespace testsupport
