#pragma once

#include <iosfwd>
#include <vector>

#include "hjm/asymptotics.hpp"
#include "hjm/grid.hpp"

namespace hjm {

/// Regular lattice lo + step * k inside [lo, hi]^dim (velocities or momenta).
struct SquareGrid {
  int dim = 2;
  double lo = -1.0;
  double hi = 1.0;
  double step = 0.25;

  int per_axis() const;
  std::vector<Vec> points() const;

  bool operator==(const SquareGrid&) const = default;
  /// Whether point k sits on the outer edge of the lattice.
  bool on_edge(int k) const;
};

struct ActionOptions {
  double h = 0.1;
  double dt = 0.4;
  /// Chebyshev radius of the step stencil in nodes; velocities are
  /// o h / dt for every offset o with |o|_inf <= reach.
  int reach = 6;
  /// Padding of the target box in length units.
  double margin = 1.0;
  /// CflViolation when more than this fraction of target nodes take their
  /// last step on the stencil boundary.
  double cfl_fraction = 0.01;
  int jobs = 0;
};

/// u_K(y) with u_{k+1}(y) = min_s u_k(y - s) + dt L(y - s/2, s/dt, omega) and
/// u_0 = 0 at the origin, +inf elsewhere.
struct ActionField {
  Grid grid;
  double horizon = 0.0;
  int steps = 0;
  std::vector<Ticks> ticks;
  /// Fraction of reached target nodes whose last step is on the stencil rim.
  double rim_fraction = 0.0;

  double value(int node) const { return from_ticks(ticks[static_cast<std::size_t>(node)]); }
  double value_at(const Vec& y) const;
};

/// Runs the scheme for round(T / dt) steps on targets padded by the margin.
/// Intermediate fields are returned for every requested step count.
std::vector<ActionField> action_values(const Hamiltonian& hamiltonian, const OmegaPoint& omega, double horizon,
                                       const Box& targets, const ActionOptions& options,
                                       const std::vector<int>& snapshot_steps);

ActionField action_value(const Hamiltonian& hamiltonian, const OmegaPoint& omega, double horizon,
                         const Box& targets, const ActionOptions& options);

struct LagrangianBar {
  SquareGrid grid;
  std::vector<Vec> q;
  double horizon = 0.0;
  /// Ensemble means of h_t(0, t q) / t at t = T/2 and t = T.
  std::vector<double> at_half;
  std::vector<double> at_full;
  std::vector<double> spread;
  /// 2 at_full - at_half when extrapolating, else at_full.
  std::vector<double> value;

  void write_csv(std::ostream& os) const;
};

struct EffectiveOptions {
  ActionOptions action;
  int omega_count = 8;
  bool extrapolate = true;
};

LagrangianBar effective_lagrangian(const Hamiltonian& hamiltonian, const SquareGrid& velocities, double horizon,
                                   const EffectiveOptions& options);

struct HamiltonianBar {
  SquareGrid grid;
  std::vector<Vec> p;
  std::vector<double> value;
  std::vector<Vec> maximizer;

  double min_value() const;
  Vec argmin() const;
  void write_csv(std::ostream& os) const;
};

/// H_bar(P) = max over the velocity grid of <P, q> - L_bar(q). Throws
/// BoundaryMax when a maximizer sits on the velocity-grid edge.
HamiltonianBar effective_hamiltonian(const LagrangianBar& lagrangian, const SquareGrid& momenta);

/// Stationary critical value of H(x, P + p, omega).
CriticalValues shifted_critical_value(const Hamiltonian& hamiltonian, const Vec& shift,
                                      const CriticalOptions& options);

/// Support function of {H_bar <= a}: max of <q, P> over grid points in the
/// sublevel and over linear-interpolation crossings of its boundary along
/// grid edges. Throws EmptyEffectiveSublevel when a < min H_bar - tol.
double sigma_bar(const HamiltonianBar& table, double level, const Vec& q, double tol = 1e-9);

}  // namespace hjm
