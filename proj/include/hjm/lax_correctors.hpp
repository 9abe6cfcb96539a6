#pragma once

#include <span>
#include <vector>

#include "hjm/metric_graph.hpp"

namespace hjm {

/// u(x) = min over y in C of g(y) + d(y, x): one multi-source sweep. The
/// trace must be 1-Lipschitz for the metric (g(x) - g(y) <= d(y, x) on C),
/// which holds iff the sweep returns u = g on C; otherwise TraceViolation
/// names a violating pair. Throws EmptySource when C is empty.
DistanceField lax_solve(const MetricGraph& graph, std::span<const int> sources, std::span<const double> trace);

struct ResidualReport {
  /// max over interior nodes of H_h(x) - a, where H_h(x) is the smallest
  /// level at which every incoming edge satisfies u(x) - u(y) <= w(y -> x);
  /// the tightest (minimizing) incoming edge sets it.
  double max_residual = 0.0;
  int worst_node = -1;
  /// max_residual / h when positive, else 0.
  double constant = 0.0;
  double allowed_constant = 10.0;
  bool subsolution = true;
  /// H_h(x) - a per node; NaN on the box boundary and at unreached nodes.
  std::vector<double> per_node;
};

/// Upwind discrete Hamiltonian of u over the graph's stencil and quadrature.
double discrete_hamiltonian(const MetricGraph& graph, std::span<const double> u, int node);

/// Subsolution verdict at the graph's level: max residual <= allowed_constant * h.
ResidualReport subsolution_residual(const MetricGraph& graph, std::span<const double> u,
                                    double allowed_constant = 10.0);

struct DefectReport {
  /// max |u(x) - min_k (u(x - o_k) + w(x - o_k -> x))| over checked nodes.
  double max_defect = 0.0;
  int worst_node = -1;
  int checked = 0;
};

/// Discrete Lax-Oleinik fixed-point defect off `exclude` and the box boundary.
DefectReport solution_residual(const MetricGraph& graph, std::span<const Ticks> u, std::span<const int> exclude);

/// Dirichlet problem u = g on the boundary set, H = a elsewhere, solved by
/// Gauss-Seidel Bellman sweeps until nothing changes.
std::vector<Ticks> dirichlet_solve(const MetricGraph& graph, std::span<const int> boundary,
                                   std::span<const double> trace);

struct CorrectorBand {
  DistanceField u;
  std::vector<int> sources;
  double level = 0.0;
  double delta = 0.0;
  /// [c - delta - C h, c + delta + C h].
  double lo = 0.0;
  double hi = 0.0;
  double observed_max = 0.0;
  /// min of H_h over interior nodes of E_delta.
  double observed_min_on_sources = 0.0;
  /// Bellman defect off E_delta; zero for an exact solution there.
  double defect_off_sources = 0.0;
  bool upper_ok = false;
  bool lower_ok = false;
  bool passed = false;
  std::vector<double> residual;
};

/// Lax solution with C = E_delta, g = 0, on a graph at level c, and the
/// two-sided residual band check.
CorrectorBand approximate_corrector(const MetricGraph& graph, double delta, double allowed_constant = 10.0);

struct AubryCorrector {
  DistanceField u;
  DefectReport defect;
  /// Defect allowed at Aubry nodes: the detection epsilon.
  double tolerance = 0.0;
  bool solution = false;
};

/// Lax solution with C = A_f on a graph at level c_f; checks the fixed point
/// at every interior node. Throws EmptyAubry when A_f is empty.
AubryCorrector corrector_from_aubry(const MetricGraph& graph, const SourceSets& sets, std::span<const double> trace);

}  // namespace hjm
