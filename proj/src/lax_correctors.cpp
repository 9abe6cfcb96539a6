#include "hjm/lax_correctors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hjm/errors.hpp"

namespace hjm {
namespace {

std::vector<char> membership(int n, std::span<const int> nodes) {
  std::vector<char> in(static_cast<std::size_t>(n), 0);
  for (int u : nodes) {
    if (u < 0 || u >= n) throw Error("node index out of range");
    in[static_cast<std::size_t>(u)] = 1;
  }
  return in;
}

}  // namespace

DistanceField lax_solve(const MetricGraph& graph, std::span<const int> sources, std::span<const double> trace) {
  if (sources.empty()) throw EmptySource("source set is empty");
  if (sources.size() != trace.size()) throw Error("trace size differs from the source set");
  std::vector<Ticks> initial(trace.size());
  for (std::size_t s = 0; s < trace.size(); ++s) initial[s] = to_ticks(trace[s]);
  DistanceField u = shortest_distances(graph, sources, initial);
  for (std::size_t s = 0; s < sources.size(); ++s) {
    const auto node = static_cast<std::size_t>(sources[s]);
    if (u.ticks[node] < initial[s]) {
      const int from = sources[static_cast<std::size_t>(u.origin[node])];
      throw TraceViolation(from, sources[s], from_ticks(initial[s] - u.ticks[node]));
    }
  }
  return u;
}

double discrete_hamiltonian(const MetricGraph& graph, std::span<const double> u, int node) {
  const double ux = u[static_cast<std::size_t>(node)];
  if (!std::isfinite(ux)) return std::numeric_limits<double>::quiet_NaN();
  double best = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < graph.degree(); ++k) {
    const int y = graph.predecessor(node, k);
    if (y < 0) continue;
    const double uy = u[static_cast<std::size_t>(y)];
    if (!std::isfinite(uy)) continue;
    best = std::max(best, graph.edge_level(y, k, ux - uy));
  }
  return std::isfinite(best) ? best : std::numeric_limits<double>::quiet_NaN();
}

ResidualReport subsolution_residual(const MetricGraph& graph, std::span<const double> u, double allowed_constant) {
  const Grid& grid = graph.grid();
  if (u.size() != static_cast<std::size_t>(grid.size())) throw Error("field size differs from the grid");
  ResidualReport r;
  r.allowed_constant = allowed_constant;
  r.max_residual = -std::numeric_limits<double>::infinity();
  r.per_node.assign(u.size(), std::numeric_limits<double>::quiet_NaN());
  for (int node = 0; node < grid.size(); ++node) {
    if (grid.on_boundary(node)) continue;
    const double res = discrete_hamiltonian(graph, u, node) - graph.level();
    if (std::isnan(res)) continue;
    r.per_node[static_cast<std::size_t>(node)] = res;
    if (res > r.max_residual) {
      r.max_residual = res;
      r.worst_node = node;
    }
  }
  r.constant = r.max_residual > 0.0 ? r.max_residual / grid.h() : 0.0;
  r.subsolution = r.max_residual <= allowed_constant * grid.h();
  return r;
}

DefectReport solution_residual(const MetricGraph& graph, std::span<const Ticks> u, std::span<const int> exclude) {
  const int n = graph.node_count();
  if (u.size() != static_cast<std::size_t>(n)) throw Error("field size differs from the graph");
  const auto skip = membership(n, exclude);
  DefectReport r;
  for (int x = 0; x < n; ++x) {
    const auto xu = static_cast<std::size_t>(x);
    if (skip[xu] || graph.grid().on_boundary(x) || u[xu] >= kUnreached) continue;
    Ticks best = kUnreached;
    for (int k = 0; k < graph.degree(); ++k) {
      const int y = graph.predecessor(x, k);
      if (y < 0 || u[static_cast<std::size_t>(y)] >= kUnreached) continue;
      best = std::min(best, u[static_cast<std::size_t>(y)] + graph.weight(y, k));
    }
    ++r.checked;
    const double defect = best >= kUnreached ? std::numeric_limits<double>::infinity()
                                             : std::abs(from_ticks(u[xu] - best));
    if (r.worst_node < 0 || defect > r.max_defect) {
      r.max_defect = defect;
      r.worst_node = x;
    }
  }
  return r;
}

std::vector<Ticks> dirichlet_solve(const MetricGraph& graph, std::span<const int> boundary,
                                   std::span<const double> trace) {
  if (boundary.empty()) throw EmptySource("boundary set is empty");
  if (boundary.size() != trace.size()) throw Error("trace size differs from the boundary set");
  const int n = graph.node_count();
  std::vector<Ticks> fixed(static_cast<std::size_t>(n), kUnreached);
  for (std::size_t s = 0; s < boundary.size(); ++s) {
    auto& f = fixed[static_cast<std::size_t>(boundary[s])];
    f = std::min(f, to_ticks(trace[s]));
  }
  std::vector<Ticks> u = fixed;
  auto relax = [&](int x) {
    const auto xu = static_cast<std::size_t>(x);
    Ticks best = fixed[xu];
    for (int k = 0; k < graph.degree(); ++k) {
      const int y = graph.predecessor(x, k);
      if (y < 0 || u[static_cast<std::size_t>(y)] >= kUnreached) continue;
      best = std::min(best, u[static_cast<std::size_t>(y)] + graph.weight(y, k));
    }
    if (best < u[xu]) {
      u[xu] = best;
      return true;
    }
    return false;
  };
  for (int sweep = 0;; ++sweep) {
    if (sweep > 2 * n + 2) throw NegativeCycle(graph.level());
    bool changed = false;
    if (sweep % 2 == 0) {
      for (int x = 0; x < n; ++x) changed = relax(x) || changed;
    } else {
      for (int x = n - 1; x >= 0; --x) changed = relax(x) || changed;
    }
    if (!changed) break;
  }
  return u;
}

CorrectorBand approximate_corrector(const MetricGraph& graph, double delta, double allowed_constant) {
  if (!(delta > 0.0)) throw ConfigError("delta must be positive");
  const double c = graph.level();
  CorrectorBand band;
  band.level = c;
  band.delta = delta;
  SourceOptions so;
  so.delta = delta;
  so.compute_aubry = false;
  band.sources = detect_sources(graph, c, c, so).approx_equilibria;
  if (band.sources.empty()) throw EmptySource("no delta-approximate equilibria in the box");
  const std::vector<double> zeros(band.sources.size(), 0.0);
  band.u = lax_solve(graph, band.sources, zeros);

  const double h = graph.grid().h();
  band.lo = c - delta - allowed_constant * h;
  band.hi = c + delta + allowed_constant * h;
  const std::vector<double> values = band.u.values();
  const ResidualReport sub =
      subsolution_residual(graph, values, allowed_constant);
  band.residual = sub.per_node;
  band.observed_max = c + sub.max_residual;
  band.upper_ok = band.observed_max <= band.hi;

  band.observed_min_on_sources = std::numeric_limits<double>::infinity();
  for (int node : band.sources) {
    const double r = band.residual[static_cast<std::size_t>(node)];
    if (!std::isnan(r)) band.observed_min_on_sources = std::min(band.observed_min_on_sources, c + r);
  }
  band.defect_off_sources = solution_residual(graph, band.u.ticks, band.sources).max_defect;
  band.lower_ok = band.observed_min_on_sources >= band.lo && band.defect_off_sources == 0.0;
  band.passed = band.upper_ok && band.lower_ok;
  return band;
}

AubryCorrector corrector_from_aubry(const MetricGraph& graph, const SourceSets& sets, std::span<const double> trace) {
  if (sets.aubry.empty()) throw EmptyAubry("no Aubry nodes detected in the box");
  AubryCorrector out;
  out.u = lax_solve(graph, sets.aubry, trace);
  out.defect = solution_residual(graph, out.u.ticks, {});
  out.tolerance = sets.epsilon;
  out.solution = out.defect.max_defect <= out.tolerance;
  return out;
}

}  // namespace hjm
