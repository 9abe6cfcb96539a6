#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "hjm/metric_graph.hpp"

namespace hjm {

/// Shared knobs for ensemble runs of d(0, T q, omega) / T.
struct StableNormOptions {
  std::vector<double> scales{5.0, 10.0, 20.0};
  int omega_count = 8;
  GraphOptions graph;
  /// The search box contains 0 and T_max q, padded by
  /// max(margin, margin_fraction * T_max) on every side.
  double margin = 2.0;
  double margin_fraction = 0.0;
  /// phi_hat from the two largest scales with the model phi + C / T;
  /// otherwise the mean at the largest scale.
  bool extrapolate = true;
  int jobs = 0;
};

struct DirectionEstimate {
  Vec direction{1.0, 0.0};
  /// ratios[k][j] = d(0, T_k q, omega_j) / T_k.
  std::vector<std::vector<double>> ratios;
  std::vector<double> mean;
  std::vector<double> per_omega;
  double phi = 0.0;
  /// Standard deviation of per_omega.
  double spread = 0.0;
  bool touched_boundary = false;
};

struct StableNormEstimate {
  double level = 0.0;
  std::vector<double> scales;
  std::vector<DirectionEstimate> directions;
  double delta_hat = 0.0;
  double kappa = 0.0;

  const DirectionEstimate& at(const Vec& q) const;
  /// Rows: direction index, angle, T, omega index, ratio.
  void write_csv(std::ostream& os) const;
};

/// count unit vectors at angles 2 pi k / count (count is forced to 2 in 1-D).
std::vector<Vec> equispaced_directions(int count, int dim);

StableNormEstimate stable_norm(const Hamiltonian& hamiltonian, double level, const std::vector<Vec>& directions,
                               const StableNormOptions& options);

struct CriticalOptions {
  StableNormOptions norm;
  std::vector<Vec> directions = equispaced_directions(16, 2);
  /// Window for the c_f bisection (sampled at omega index 0).
  Box free_box{2, {-5.0, -5.0}, {5.0, 5.0}};
  double tol = 0.01;
  /// Defaults to 5 kappa h / T_max, an error scale of the snapped targets.
  std::optional<double> theta;
  /// Directions with phi_hat_c below this are reported as degenerate;
  /// defaults to theta.
  std::optional<double> degeneracy_cutoff;
};

struct CriticalValues {
  CriticalBracket free;
  CriticalBracket stationary;
  double theta = 0.0;
  int nondegeneracy_evaluations = 0;
  StableNormEstimate at_critical;
  std::vector<Vec> degenerate_directions;
  /// phi_hat_c >= -spread in every direction.
  bool nonnegative_at_critical = true;
};

/// c_f by negative-cycle bisection, then c = inf{a >= c_f : delta_hat_a >= theta}
/// by bisection.
CriticalValues stationary_critical_value(const Hamiltonian& hamiltonian, const CriticalOptions& options);

struct KingmanRow {
  int n = 1;
  double mean = 0.0;
  double stddev = 0.0;
};

struct KingmanReport {
  std::vector<KingmanRow> rows;
  /// mean_{2n} <= mean_n + 3 standard errors for all consecutive rows.
  bool nonincreasing = true;
  /// d(0, 2n q) <= d(0, n q) + d(n q, 2n q) for every omega and n.
  bool subadditive = true;
  int subadditivity_checks = 0;
};

/// Sequence of mean d(0, n q) / n along n = 1, 2, 4, ..., n_max.
KingmanReport kingman_diagnostics(const Hamiltonian& hamiltonian, double level, const Vec& q, int n_max,
                                  const StableNormOptions& options);

}  // namespace hjm
