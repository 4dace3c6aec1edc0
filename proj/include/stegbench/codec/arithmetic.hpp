#pragma once

#include <span>
#include <vector>

#include "stegbench/codec/payload.hpp"
#include "stegbench/lm/distribution.hpp"

namespace stegbench::codec {

using u128 = unsigned __int128;

struct Subinterval {
  lm::TokenId token;
  u128 lo;
  u128 hi;  // exclusive

  friend bool operator==(const Subinterval&, const Subinterval&) = default;
};

// Splits [lo, hi) among the ranked pool: width floor(p * range) per token,
// the rounding remainder going to rank 0, zero-width tokens dropped. The
// result tiles [lo, hi) in rank order.
std::vector<Subinterval> partition_interval(std::span<const lm::Entry> pool, u128 lo, u128 hi);

// W-bit coding interval shared by the embedding and extraction sides.
class ArithmeticState {
 public:
  explicit ArithmeticState(int precision);

  u128 lo() const { return lo_; }
  u128 hi() const { return hi_; }
  int precision() const { return precision_; }

  // Moves to `sub` and shifts out the leading bits that lo and hi-1 now
  // share. Those bits are appended to `out` (if given); returns their count.
  std::size_t narrow(const Subinterval& sub, Bits* out = nullptr);

 private:
  int precision_;
  u128 mask_;
  u128 lo_;
  u128 hi_;
};

}  // namespace stegbench::codec
