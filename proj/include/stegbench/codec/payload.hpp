#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace stegbench::codec {

// One bit per element, values 0 or 1.
using Bits = std::vector<std::uint8_t>;

inline constexpr std::size_t kHeaderBits = 32;

// Secret message. On the wire it is framed as a 32-bit big-endian length
// header followed by the payload bits; codecs pad the frame with zeros to
// their own step granularity.
struct Payload {
  Bits bits;

  std::size_t declared_length() const { return bits.size(); }

  // Four bits per hex digit, most significant first.
  static Payload from_hex(std::string_view hex);
  // Hex digits for the bits, the last digit zero-padded on the right.
  std::string to_hex() const;

  friend bool operator==(const Payload&, const Payload&) = default;
};

Bits frame(const Payload& payload);

// Reads the 32-bit length header from the first kHeaderBits of `bits`.
std::uint32_t read_header(const Bits& bits);

// Random-access view of a framed bit string that yields zeros past the end.
class PaddedBits {
 public:
  explicit PaddedBits(const Bits& bits) : bits_(&bits) {}

  std::uint8_t at(std::size_t i) const { return i < bits_->size() ? (*bits_)[i] : 0; }
  std::size_t size() const { return bits_->size(); }

  // `count` bits starting at `pos`, big-endian.
  std::uint64_t read(std::size_t pos, int count) const;

 private:
  const Bits* bits_;
};

}  // namespace stegbench::codec
