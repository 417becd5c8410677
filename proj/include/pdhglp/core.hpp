#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace pdhglp {

using Scalar = double;
using Index = std::int64_t;
using Vector = std::vector<Scalar>;

inline constexpr Scalar kInf = std::numeric_limits<Scalar>::infinity();

// Product with the convention 0 * (+-inf) = 0, used by the dual penalty and
// everything downstream of it.
inline Scalar mul_zero_inf(Scalar a, Scalar b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  return a * b;
}

inline Scalar pos_part(Scalar v) { return v > 0.0 ? v : 0.0; }
inline Scalar neg_part(Scalar v) { return v < 0.0 ? -v : 0.0; }

inline Scalar clamp(Scalar v, Scalar lo, Scalar hi) {
  return v < lo ? lo : (v > hi ? hi : v);
}

// Distance from v to the interval [lo, hi]; zero inside, never negative.
inline Scalar interval_distance(Scalar v, Scalar lo, Scalar hi) {
  if (v < lo) return lo - v;
  if (v > hi) return v - hi;
  return 0.0;
}

inline bool is_finite(Scalar v) { return std::isfinite(v); }

}  // namespace pdhglp
