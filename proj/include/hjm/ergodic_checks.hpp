#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hjm/grid.hpp"
#include "hjm/hamiltonian.hpp"

namespace hjm {

using TorusFunction = std::function<double(std::span<const double>)>;

enum class Verdict { accepted, rejected, inconclusive };

std::string to_string(Verdict v);

struct BirkhoffTable {
  std::vector<double> radii;
  /// Mean of f(tau_x omega) over lattice points of B_r.
  std::vector<double> means;
  std::vector<long long> counts;
};

/// Ball averages for every radius in one pass over the lattice h Z^N.
BirkhoffTable birkhoff_average(const TorusEnvironment& env, const TorusFunction& f, const OmegaPoint& omega,
                               std::span<const double> radii, double h, int jobs = 0);

/// X(omega) = {x : lo <= f(tau_x omega) <= hi} for a continuous torus function f.
struct StationarySet {
  TorusEnvironment env;
  TorusFunction field;
  double lo = 0.0;
  double hi = 0.0;

  bool contains(const Vec& x, const OmegaPoint& omega) const;
};

struct SetSample {
  Grid grid;
  std::vector<char> inside;

  double volume_fraction() const;
};

SetSample sample_set(const StationarySet& set, const OmegaPoint& omega, const Box& window, double h, int jobs = 0);

struct DensityTable {
  std::vector<double> big_radii;
  std::vector<double> ball_radii;
  /// ratio[k][m] = |(X + B_{R_k}) cap B_{r_m}| / |B_{r_m}| on lattice points.
  std::vector<std::vector<double>> ratio;
  /// For eps in {0.2, 0.1, 0.05}: least sampled R with tail ratio >= 1 - eps.
  std::vector<double> epsilons{0.2, 0.1, 0.05};
  std::vector<std::optional<double>> least_radius;
  /// ratio nondecreasing in R for every r.
  bool monotone_in_R = true;

  void write_csv(std::ostream& os) const;
};

/// Samples X on B_{r_max + R_max} around 0 and uses an exact Euclidean
/// distance transform. Throws EmptySample when no lattice point is in X.
DensityTable density_asymptotics(const StationarySet& set, const OmegaPoint& omega, std::vector<double> big_radii,
                                 std::vector<double> ball_radii, double h, int jobs = 0);

/// Squared Euclidean distance (in grid units) to the nearest marked node.
std::vector<double> distance_transform(const Grid& grid, const std::vector<char>& marked);

/// A computed field u on a grid, normalized by its value at the origin node.
struct AdmissibleCandidate {
  Grid grid;
  std::vector<double> u;

  double at(const Vec& x) const;
  /// max over ring nodes (| |x| - r | <= h/2) of |u(x) - u(0)| / r.
  double profile(double r) const;
};

struct SublinearityOptions {
  double accept_ratio = 0.5;
  double reject_ratio = 0.9;
};

struct SublinearityReport {
  std::vector<double> radii;
  std::vector<double> profile;
  /// Least-squares slope of the profile against 1/r.
  double slope = 0.0;
  Verdict verdict = Verdict::inconclusive;
};

SublinearityReport sublinearity_test(const AdmissibleCandidate& candidate, std::span<const double> radii,
                                     const SublinearityOptions& options = {});

struct MeanIncrementReport {
  double mean = 0.0;
  double standard_error = 0.0;
  int samples = 0;
  Verdict verdict = Verdict::inconclusive;
};

/// Ensemble mean of u(y, omega) - u(x, omega); accepted when |mean| <= 3 SE.
MeanIncrementReport mean_increment_test(std::span<const AdmissibleCandidate> ensemble, const Vec& x, const Vec& y);

}  // namespace hjm
