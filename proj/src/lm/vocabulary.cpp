#include "stegbench/lm/vocabulary.hpp"

#include "stegbench/error.hpp"

namespace stegbench::lm {

Vocabulary::Vocabulary() {
  for (std::string_view s : {kBosSurface, kEosSurface, kUnkSurface}) {
    index_.emplace(std::string(s), static_cast<TokenId>(tokens_.size()));
    tokens_.emplace_back(s);
  }
}

TokenId Vocabulary::add(std::string_view surface) {
  if (auto it = index_.find(std::string(surface)); it != index_.end()) return it->second;
  const auto id = static_cast<TokenId>(tokens_.size());
  tokens_.emplace_back(surface);
  index_.emplace(tokens_.back(), id);
  return id;
}

std::optional<TokenId> Vocabulary::find(std::string_view surface) const {
  if (auto it = index_.find(std::string(surface)); it != index_.end()) return it->second;
  return std::nullopt;
}

TokenId Vocabulary::lookup(std::string_view surface) const {
  auto id = find(surface);
  if (!id || *id == kBos || *id == kEos) return kUnk;
  return *id;
}

const std::string& Vocabulary::surface(TokenId id) const {
  if (id >= tokens_.size()) {
    throw Error(ErrorCode::UnknownToken, "token id " + std::to_string(id) + " outside vocabulary");
  }
  return tokens_[id];
}

}  // namespace stegbench::lm
