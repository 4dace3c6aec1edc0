#include "stegbench/codec/arithmetic.hpp"

#include "stegbench/error.hpp"

namespace stegbench::codec {

std::vector<Subinterval> partition_interval(std::span<const lm::Entry> pool, u128 lo, u128 hi) {
  if (pool.empty() || hi <= lo) throw Error(ErrorCode::InvalidParams, "cannot partition an empty interval");
  const u128 range = hi - lo;
  const auto range_ld = static_cast<long double>(range);
  std::vector<u128> widths(pool.size());
  u128 sum = 0;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const long double w = static_cast<long double>(pool[i].prob) * range_ld;
    widths[i] = w <= 0.0L ? 0 : static_cast<u128>(w);
    if (widths[i] > range) widths[i] = range;
    sum += widths[i];
  }
  if (sum <= range) {
    widths[0] += range - sum;
  } else {
    const u128 excess = sum - range;
    if (widths[0] <= excess) throw Error(ErrorCode::InvalidParams, "distribution mass exceeds one");
    widths[0] -= excess;
  }
  // A narrow interval straddling the midpoint can floor every width but the
  // first to zero; the next step would then repeat the same interval forever.
  // Keeping one unit for the runner-up guarantees progress.
  if (pool.size() >= 2 && range >= 2 && widths[1] == 0) {
    widths[1] = 1;
    widths[0] -= 1;
  }
  std::vector<Subinterval> out;
  out.reserve(pool.size());
  u128 cursor = lo;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (widths[i] == 0) continue;
    out.push_back({pool[i].token, cursor, cursor + widths[i]});
    cursor += widths[i];
  }
  return out;
}

ArithmeticState::ArithmeticState(int precision) : precision_(precision) {
  if (precision < 16 || precision > 64) throw Error(ErrorCode::InvalidParams, "precision must be in [16, 64]");
  mask_ = (u128{1} << precision) - 1;
  lo_ = 0;
  hi_ = u128{1} << precision;
}

std::size_t ArithmeticState::narrow(const Subinterval& sub, Bits* out) {
  lo_ = sub.lo;
  u128 top = sub.hi - 1;
  std::size_t shared = 0;
  while (static_cast<int>(shared) < precision_) {
    const int bit = precision_ - 1 - static_cast<int>(shared);
    const auto lo_bit = static_cast<std::uint8_t>((lo_ >> bit) & 1);
    if (lo_bit != static_cast<std::uint8_t>((top >> bit) & 1)) break;
    if (out != nullptr) out->push_back(lo_bit);
    ++shared;
  }
  lo_ = (lo_ << shared) & mask_;
  top = ((top << shared) & mask_) | ((u128{1} << shared) - 1);
  hi_ = top + 1;
  return shared;
}

}  // namespace stegbench::codec
