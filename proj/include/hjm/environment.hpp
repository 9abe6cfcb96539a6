#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hjm/geometry.hpp"

namespace hjm {

inline constexpr int kMaxTorusDim = 8;

/// A point of the torus [0,1)^d.
struct OmegaPoint {
  std::vector<double> coords;

  bool operator==(const OmegaPoint&) const = default;
};

/// Fractional part in [0, 1).
double frac(double t);

double golden_ratio();

/// The ergodic system (tau_x) realized as the linear flow
/// (tau_x omega)_i = omega_i + <v_i, x>  (mod 1)
/// on the d-torus, with v_i the rows of a d x N flow matrix. Sampling omega
/// uniformly on [0,1)^d is the invariant measure.
class TorusEnvironment {
 public:
  TorusEnvironment(int torus_dim, int physical_dim, std::vector<double> flow_matrix,
                   std::uint64_t seed);

  /// T^4 with v_1 = (1,0), v_2 = (lambda,0), v_3 = (0,1), v_4 = (0,lambda).
  static TorusEnvironment product_flow(double lambda, std::uint64_t seed);
  /// Identity flow on T^N: purely periodic data.
  static TorusEnvironment periodic(int physical_dim, std::uint64_t seed);

  int torus_dim() const { return torus_dim_; }
  int physical_dim() const { return physical_dim_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<double>& flow_matrix() const { return flow_; }
  double flow(int i, int j) const { return flow_[static_cast<std::size_t>(i * physical_dim_ + j)]; }

  TorusEnvironment with_seed(std::uint64_t seed) const;

  /// Deterministic in (seed, k) and independent of call order.
  OmegaPoint sample_omega(std::uint64_t k) const;
  OmegaPoint origin() const;

  OmegaPoint translate(const OmegaPoint& omega, const Vec& x) const;

  /// Writes frac(omega_i + <v_i, x>) for i < d into out.
  void phases(const OmegaPoint& omega, const Vec& x, std::span<double> out) const;

  /// True when the flow matrix has full column rank. Rational independence of
  /// the rows, which ergodicity needs, is not checked.
  bool full_rank() const;

 private:
  int torus_dim_;
  int physical_dim_;
  std::vector<double> flow_;
  std::uint64_t seed_;
};

}  // namespace hjm
