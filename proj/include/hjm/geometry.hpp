#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace hjm {

/// Physical dimension is 1 or 2; a 1-D point keeps its second component at 0.
inline constexpr int kMaxDim = 2;

using Vec = std::array<double, kMaxDim>;

inline double dot(const Vec& a, const Vec& b) { return a[0] * b[0] + a[1] * b[1]; }
inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }
inline Vec operator+(const Vec& a, const Vec& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Vec operator-(const Vec& a, const Vec& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Vec operator*(double s, const Vec& a) { return {s * a[0], s * a[1]}; }

/// Axis-aligned window in R^dim.
struct Box {
  int dim = 2;
  Vec lo{0.0, 0.0};
  Vec hi{0.0, 0.0};

  bool contains(const Vec& x) const {
    for (int i = 0; i < dim; ++i) {
      if (x[i] < lo[i] || x[i] > hi[i]) return false;
    }
    return true;
  }
};

/// Path costs are accumulated in fixed point. Sums along concatenated paths
/// are then exact, so graph identities hold without tolerance.
using Ticks = std::int64_t;

inline constexpr double kTicksPerUnit = 4294967296.0;  // 2^32
inline constexpr Ticks kUnreached = std::numeric_limits<Ticks>::max() / 4;

inline Ticks to_ticks(double v) { return static_cast<Ticks>(std::llround(v * kTicksPerUnit)); }
inline double from_ticks(Ticks t) {
  if (t >= kUnreached) return std::numeric_limits<double>::infinity();
  return static_cast<double>(t) / kTicksPerUnit;
}

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace hjm
