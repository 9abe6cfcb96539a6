#pragma once

#include <vector>

#include "hjm/environment.hpp"
#include "hjm/hamiltonian.hpp"
#include "hjm/metric_graph.hpp"

namespace hjm::test {

inline Hamiltonian constant_potential(double v, int dim = 2) {
  return Hamiltonian({TorusEnvironment::periodic(dim, 1), HamiltonianForm::eikonal,
                      {PotentialKind::constant, {v}}, {}, {0.0, 0.0}});
}

/// V(x) = |sin(pi x)| on the line when evaluated at the origin of the torus.
inline Hamiltonian sine_1d(double amplitude = 1.0) {
  return Hamiltonian({TorusEnvironment::periodic(1, 1), HamiltonianForm::eikonal,
                      {PotentialKind::single_cosine_1d, {amplitude, 0.0}}, {}, {0.0, 0.0}});
}

inline Hamiltonian product_example(std::uint64_t seed = 1, double lambda = golden_ratio()) {
  return Hamiltonian({TorusEnvironment::product_flow(lambda, seed), HamiltonianForm::eikonal,
                      {PotentialKind::product_quasiperiodic, {}}, {}, {0.0, 0.0}});
}

inline Box square(double lo, double hi) { return Box{2, {lo, lo}, {hi, hi}}; }
inline Box segment(double lo, double hi) { return Box{1, {lo, 0.0}, {hi, 0.0}}; }

inline GraphOptions graph_opts(double h, int radius) {
  GraphOptions o;
  o.h = h;
  o.stencil_radius = radius;
  return o;
}

/// u(y) - u(x) <= w(x -> y) on every edge, in ticks.
inline bool graph_subsolution(const MetricGraph& graph, const std::vector<Ticks>& u) {
  for (int node = 0; node < graph.node_count(); ++node) {
    for (int k = 0; k < graph.degree(); ++k) {
      const int next = graph.neighbor(node, k);
      if (next < 0) continue;
      if (u[static_cast<std::size_t>(next)] - u[static_cast<std::size_t>(node)] > graph.weight(node, k)) return false;
    }
  }
  return true;
}

}  // namespace hjm::test
