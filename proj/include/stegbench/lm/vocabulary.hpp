#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace stegbench::lm {

using TokenId = std::uint32_t;

inline constexpr TokenId kBos = 0;
inline constexpr TokenId kEos = 1;
inline constexpr TokenId kUnk = 2;
inline constexpr TokenId kFirstWordId = 3;

inline constexpr std::string_view kBosSurface = "<s>";
inline constexpr std::string_view kEosSurface = "</s>";
inline constexpr std::string_view kUnkSurface = "<unk>";

// Dense id <-> surface mapping. Ids 0..2 are reserved for BOS, EOS and UNK;
// every other surface string maps to exactly one id.
class Vocabulary {
 public:
  Vocabulary();

  // Appends a word; returns the existing id if the surface is already known.
  TokenId add(std::string_view surface);

  std::optional<TokenId> find(std::string_view surface) const;
  // Unknown surfaces (and the literal BOS/EOS markers) map to UNK.
  TokenId lookup(std::string_view surface) const;

  const std::string& surface(TokenId id) const;
  std::size_t size() const { return tokens_.size(); }
  bool contains(TokenId id) const { return id < tokens_.size(); }

  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
};

}  // namespace stegbench::lm
