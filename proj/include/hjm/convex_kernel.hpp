#pragma once

#include <iosfwd>
#include <vector>

#include "hjm/hamiltonian.hpp"

namespace hjm {

/// Sublevels Z_a(x, omega) = {p : H(x,p,omega) <= a} and their support
/// functions sigma_a(x, q, omega) = sup{<q,p> : p in Z_a(x, omega)}.
class SublevelGeometry {
 public:
  SublevelGeometry(Hamiltonian hamiltonian, double level, int polar_directions = 256);

  double level() const { return level_; }
  double kappa() const { return kappa_; }
  int polar_directions() const { return polar_directions_; }
  const Hamiltonian& hamiltonian() const { return hamiltonian_; }

  /// Closed form <center, q> + |q| sqrt(a + V^2). Throws EmptySublevel.
  double support(const Vec& x, const Vec& q, const OmegaPoint& omega) const;
  double support(const LocalData& local, const Vec& q) const;

  /// Form-agnostic route: radius bisection on H(center + r u) = a along
  /// polar_directions boundary directions u, then max_u <q, center + r(u) u>.
  /// Only H evaluations are used; the center is the pointwise minimizer.
  double support_polar(const Vec& x, const Vec& q, const OmegaPoint& omega) const;

 private:
  Hamiltonian hamiltonian_;
  double level_;
  double kappa_;
  int polar_directions_;
};

/// delta(b, a) with Z_a + B_delta contained in Z_b for every (x, omega); a <= b.
double sublevel_gap(const Hamiltonian& hamiltonian, double a, double b);

/// L(x, q, omega) = max_p <q,p> - H(x,p,omega) = |q|^2/4 + V^2 + <b - P, q>.
class Lagrangian {
 public:
  explicit Lagrangian(Hamiltonian hamiltonian) : hamiltonian_(std::move(hamiltonian)) {}

  double value(const Vec& x, const Vec& q, const OmegaPoint& omega) const;
  static double value(const LocalData& local, const Vec& q) {
    return 0.25 * dot(q, q) + local.v2 + dot(local.center, q);
  }
  const Hamiltonian& hamiltonian() const { return hamiltonian_; }

 private:
  Hamiltonian hamiltonian_;
};

/// inf over lambda > 0 of (L(x, lambda q, omega) + a) / lambda by golden-section
/// search. Agrees with SublevelGeometry::support; throws EmptySublevel.
double sigma_from_lagrangian(const Lagrangian& lagrangian, double a, const Vec& x, const Vec& q,
                             const OmegaPoint& omega);

/// L(x, ., omega) sampled on a velocity grid at one (x, omega).
struct LagrangianTable {
  Vec x{0.0, 0.0};
  OmegaPoint omega;
  std::vector<Vec> velocities;
  std::vector<double> values;

  static LagrangianTable build(const Lagrangian& lagrangian, const Vec& x, const OmegaPoint& omega,
                               double radius, double step);

  /// max over the table of <p, q> - L(q): the double transform at p.
  double conjugate(const Vec& p) const;
  void write_csv(std::ostream& os) const;
};

}  // namespace hjm
