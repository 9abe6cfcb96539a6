#pragma once

#include <array>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hjm/convex_kernel.hpp"
#include "hjm/grid.hpp"
#include "hjm/hamiltonian.hpp"

namespace hjm {

enum class Quadrature { midpoint, trapezoid, simpson };

std::string to_string(Quadrature q);
Quadrature quadrature_from_string(const std::string& name);

struct GraphOptions {
  double h = 0.05;
  int stencil_radius = 3;
  Quadrature quadrature = Quadrature::midpoint;
  int jobs = 0;
};

/// V^2 and the drift b sampled on the half-step lattice of a
/// grid. Every quadrature node of every stencil edge (r <= 3) lies on it.
class HalfGridSamples {
 public:
  HalfGridSamples(const Hamiltonian& hamiltonian, const Grid& grid, const OmegaPoint& omega, int jobs);

  int extent(int axis) const { return m_[static_cast<std::size_t>(axis)]; }
  int index(int i2, int j2) const { return j2 * m_[0] + i2; }
  double v2(int s) const { return v2_[static_cast<std::size_t>(s)]; }
  Vec center(int s) const {
    if (center_x_.empty()) return {0.0, 0.0};
    return {center_x_[static_cast<std::size_t>(s)], center_y_[static_cast<std::size_t>(s)]};
  }
  double min_v2() const { return min_v2_; }

 private:
  std::array<int, 2> m_{1, 1};
  std::vector<double> v2_;
  std::vector<double> center_x_;
  std::vector<double> center_y_;
  double min_v2_ = 0.0;
};

/// Grid discretization of the semidistance S_a: nodes of a box lattice,
/// edges to every coprime offset within the stencil radius, and weights
/// w_a(x -> y) = quadrature of sigma_a(., y - x, omega) along [x, y].
/// Weights are evaluated on demand from the sampled field and are not
/// assumed symmetric. The momentum shift enters as -<P, y - x>, rounded per
/// lattice axis so that it is an exact gradient in ticks.
class MetricGraph {
 public:
  MetricGraph(const Hamiltonian& hamiltonian, const Box& box, double level, const OmegaPoint& omega,
              GraphOptions options = {});

  /// Same samples and stencil at a different level (cheap).
  MetricGraph at_level(double level) const;

  const Hamiltonian& hamiltonian() const { return *hamiltonian_; }
  const Grid& grid() const { return grid_; }
  const Stencil& stencil() const { return stencil_; }
  const GraphOptions& options() const { return options_; }
  const OmegaPoint& omega() const { return omega_; }
  double level() const { return level_; }
  int node_count() const { return grid_.size(); }
  int degree() const { return static_cast<int>(stencil_.offsets.size()); }

  /// Head of edge k out of node, or -1 when it leaves the box.
  int neighbor(int node, int k) const;
  /// Tail of edge k into node (node - offset_k), or -1.
  int predecessor(int node, int k) const;
  /// Weight of edge k out of node in fixed point; the edge must exist.
  Ticks weight(int node, int k) const;
  double weight_value(int node, int k) const { return from_ticks(weight(node, k)); }

  /// Weight without the shift term; weight = base_weight - (psi(head) - psi(tail)).
  Ticks base_weight(int node, int k) const;
  /// psi(i, j) = i * round(P_1 h) + j * round(P_2 h) in ticks.
  Ticks lattice_potential(int node) const;
  /// Whether every base weight is >= 0 (always for the eikonal form).
  bool base_nonnegative() const;

  /// min_p H at a node: -V^2.
  double pointwise_min(int node) const;
  /// max over all half-step samples of -V^2.
  double max_pointwise_min() const { return -samples_->min_v2(); }
  Ticks min_weight() const;

  /// Smallest level a' at which the weight of edge k out of node reaches
  /// `increment`; never below the largest -V^2 sampled on the edge.
  double edge_level(int node, int k, double increment) const;

 private:
  MetricGraph() = default;
  double sigma_at(int sample, const Vec& q, double qnorm) const;
  /// Quadrature samples of edge k out of node with their weights.
  int edge_samples(int node, int k, std::array<int, 3>& samples, std::array<double, 3>& coeffs) const;

  std::shared_ptr<const Hamiltonian> hamiltonian_;
  std::shared_ptr<const HalfGridSamples> samples_;
  Grid grid_;
  Stencil stencil_;
  GraphOptions options_;
  OmegaPoint omega_;
  double level_ = 0.0;
  std::vector<Vec> offset_vectors_;
  std::vector<double> offset_norms_;
  std::array<Ticks, 2> shift_ticks_{0, 0};
  std::vector<Ticks> offset_shift_;
};

enum class Direction { forward, backward };

struct SearchOptions {
  Direction direction = Direction::forward;
  /// Dijkstra stops once all of these are settled (ignored by the
  /// label-correcting path).
  std::vector<int> targets;
};

/// Graph distances from a source set. forward: d(source, node);
/// backward: d(node, source).
struct DistanceField {
  Grid grid;
  double level = 0.0;
  OmegaPoint omega;
  Direction direction = Direction::forward;
  std::vector<int> sources;
  std::vector<Ticks> ticks;
  std::vector<int> parent;
  std::vector<int> origin;
  bool reached_all = false;

  double value(int node) const { return from_ticks(ticks[static_cast<std::size_t>(node)]); }
  /// Values in length units; +inf at unreached nodes.
  std::vector<double> values() const;
  /// Whether the search-tree path realizing this node visits the box boundary.
  bool path_touches_boundary(int node) const;

  void write_csv(std::ostream& os) const;
  /// Row-major float64 dump plus a JSON header file (path + ".json").
  void write_binary(const std::string& path, std::uint64_t seed) const;
};

DistanceField shortest_distances(const MetricGraph& graph, int source, const SearchOptions& options = {});

/// Multi-source search with initial values at the sources. Uses Dijkstra on
/// the base weights when they are nonnegative (the shift is a lattice
/// gradient and is added back exactly), otherwise a label-correcting search
/// that throws NegativeCycle.
DistanceField shortest_distances(const MetricGraph& graph, std::span<const int> sources,
                                 std::span<const Ticks> initial, const SearchOptions& options = {});

/// Whether the graph at its level has a negative cycle reachable from node 0.
bool has_negative_cycle(const MetricGraph& graph);

struct CriticalBracket {
  double lo = 0.0;
  double hi = 0.0;
  int iterations = 0;

  double width() const { return hi - lo; }
  double estimate() const { return hi; }
};

/// Bisection for the smallest level without negative cycles, between the
/// sampled sup of min_p H and beta(0) + 1.
CriticalBracket free_critical_value(const Hamiltonian& hamiltonian, const OmegaPoint& omega, const Box& box,
                                    const GraphOptions& options, double tol);

struct SourceOptions {
  /// E: nodes with min_p H >= c_f - equilibrium_tol.
  double equilibrium_tol = 1e-9;
  /// E_delta: nodes with min_p H >= c - delta. Also the default Aubry cycle length.
  double delta = 0.25;
  std::optional<double> aubry_length;
  /// epsilon defaults to aubry_constant * length * h.
  double aubry_constant = 4.0;
  std::optional<double> epsilon;
  bool compute_aubry = true;
};

struct SourceSets {
  std::vector<int> equilibria;
  std::vector<int> approx_equilibria;
  std::vector<int> aubry;
  double epsilon = 0.0;
  double aubry_length = 0.0;
};

/// Equilibria, delta-approximate equilibria and the discrete Aubry set of a
/// graph built at level c_f_est. A node y is in the Aubry set when some
/// closed walk through y of Euclidean length >= L has action <= epsilon:
/// either an excursion to a node at distance >= L/2 and back, or a round trip
/// to a nearby node z followed by enough repetitions of the cheapest 2-cycle
/// at z to reach length L.
SourceSets detect_sources(const MetricGraph& graph, double c_f_est, double c_est, const SourceOptions& options);

}  // namespace hjm
