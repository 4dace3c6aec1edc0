#include "stegbench/codec/payload.hpp"

#include <cctype>

#include "stegbench/error.hpp"

namespace stegbench::codec {

Payload Payload::from_hex(std::string_view hex) {
  Payload out;
  out.bits.reserve(hex.size() * 4);
  for (char c : hex) {
    int v;
    if (c >= '0' && c <= '9') v = c - '0';
    else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
    else throw Error(ErrorCode::InvalidParams, std::string("bad hex digit '") + c + "'");
    for (int b = 3; b >= 0; --b) out.bits.push_back(static_cast<std::uint8_t>((v >> b) & 1));
  }
  return out;
}

std::string Payload::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  for (std::size_t i = 0; i < bits.size(); i += 4) {
    int v = 0;
    for (std::size_t b = 0; b < 4; ++b) v = (v << 1) | (i + b < bits.size() ? bits[i + b] : 0);
    out += kDigits[v];
  }
  return out;
}

Bits frame(const Payload& payload) {
  if (payload.bits.size() > 0xFFFFFFFFULL) throw Error(ErrorCode::InvalidParams, "payload longer than 2^32-1 bits");
  const auto length = static_cast<std::uint32_t>(payload.bits.size());
  Bits out;
  out.reserve(kHeaderBits + payload.bits.size());
  for (int b = 31; b >= 0; --b) out.push_back(static_cast<std::uint8_t>((length >> b) & 1U));
  for (auto bit : payload.bits) {
    if (bit > 1) throw Error(ErrorCode::InvalidParams, "payload bits must be 0 or 1");
    out.push_back(bit);
  }
  return out;
}

std::uint32_t read_header(const Bits& bits) {
  if (bits.size() < kHeaderBits) throw Error(ErrorCode::TruncatedStego, "length header incomplete");
  std::uint32_t length = 0;
  for (std::size_t i = 0; i < kHeaderBits; ++i) length = (length << 1) | bits[i];
  return length;
}

std::uint64_t PaddedBits::read(std::size_t pos, int count) const {
  std::uint64_t v = 0;
  for (int i = 0; i < count; ++i) v = (v << 1) | at(pos + static_cast<std::size_t>(i));
  return v;
}

}  // namespace stegbench::codec
