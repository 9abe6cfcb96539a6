#include "hjm/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "hjm/errors.hpp"
#include "hjm/parallel.hpp"

namespace hjm {
namespace {

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double stddev_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

/// Lattice-aligned box (0 is a node) containing every point, padded by pad.
Box snapped_box(int dim, const std::vector<Vec>& points, double pad, double h) {
  Box b;
  b.dim = dim;
  for (int a = 0; a < dim; ++a) {
    const auto ax = static_cast<std::size_t>(a);
    double lo = 0.0;
    double hi = 0.0;
    for (const Vec& p : points) {
      lo = std::min(lo, p[ax]);
      hi = std::max(hi, p[ax]);
    }
    b.lo[ax] = std::floor((lo - pad) / h) * h;
    b.hi[ax] = std::ceil((hi + pad) / h) * h;
  }
  return b;
}

double padding(const StableNormOptions& options, double t_max) {
  return std::max(options.margin, options.margin_fraction * t_max);
}

void check_options(const StableNormOptions& options) {
  if (options.scales.empty()) throw ConfigError("at least one scale is required");
  for (double t : options.scales) {
    if (!(t > 0.0)) throw ConfigError("scales must be positive");
  }
  if (options.omega_count < 1) throw ConfigError("omega_count must be positive");
}

}  // namespace

const DirectionEstimate& StableNormEstimate::at(const Vec& q) const {
  std::size_t best = 0;
  double best_dist = INFINITY;
  for (std::size_t i = 0; i < directions.size(); ++i) {
    const Vec d = directions[i].direction - q;
    if (dot(d, d) < best_dist) {
      best_dist = dot(d, d);
      best = i;
    }
  }
  if (directions.empty()) throw Error("empty stable norm estimate");
  return directions[best];
}

void StableNormEstimate::write_csv(std::ostream& os) const {
  os << "direction,angle (rad),T (length),omega,ratio (action/length)\n";
  for (std::size_t i = 0; i < directions.size(); ++i) {
    const auto& d = directions[i];
    const double angle = std::atan2(d.direction[1], d.direction[0]);
    for (std::size_t k = 0; k < scales.size(); ++k) {
      for (std::size_t j = 0; j < d.ratios[k].size(); ++j) {
        os << i << ',' << angle << ',' << scales[k] << ',' << j << ',' << d.ratios[k][j] << '\n';
      }
    }
  }
}

std::vector<Vec> equispaced_directions(int count, int dim) {
  if (dim == 1) return {{1.0, 0.0}, {-1.0, 0.0}};
  if (count < 1) throw ConfigError("direction count must be positive");
  std::vector<Vec> out;
  for (int k = 0; k < count; ++k) {
    const double t = 2.0 * kPi * k / count;
    out.push_back({std::cos(t), std::sin(t)});
  }
  return out;
}

StableNormEstimate stable_norm(const Hamiltonian& hamiltonian, double level, const std::vector<Vec>& directions,
                               const StableNormOptions& options) {
  check_options(options);
  if (directions.empty()) throw ConfigError("at least one direction is required");
  std::vector<double> scales = options.scales;
  std::sort(scales.begin(), scales.end());
  const double t_max = scales.back();
  const double h = options.graph.h;
  const auto n_scales = scales.size();
  const auto n_omega = static_cast<std::size_t>(options.omega_count);

  StableNormEstimate est;
  est.level = level;
  est.scales = scales;
  est.kappa = hamiltonian.kappa(level);
  est.directions.resize(directions.size());
  for (std::size_t i = 0; i < directions.size(); ++i) {
    est.directions[i].direction = directions[i];
    est.directions[i].ratios.assign(n_scales, std::vector<double>(n_omega, 0.0));
  }
  std::vector<char> touched(directions.size() * n_omega, 0);

  GraphOptions inner = options.graph;
  inner.jobs = 1;
  parallel_for(directions.size() * n_omega, options.jobs, [&](std::size_t job) {
    const std::size_t i = job / n_omega;
    const std::size_t j = job % n_omega;
    const Vec q = directions[i];
    const Box box = snapped_box(hamiltonian.dim(), {t_max * q}, padding(options, t_max), h);
    const OmegaPoint omega = hamiltonian.env().sample_omega(j);
    const MetricGraph graph(hamiltonian, box, level, omega, inner);
    const int origin = graph.grid().nearest({0.0, 0.0});
    SearchOptions search;
    for (double t : scales) search.targets.push_back(graph.grid().nearest(t * q));
    const DistanceField field = shortest_distances(graph, origin, search);
    for (std::size_t k = 0; k < n_scales; ++k) {
      const int node = search.targets[k];
      est.directions[i].ratios[k][j] = field.value(node) / scales[k];
      if (field.path_touches_boundary(node)) touched[job] = 1;
    }
  });

  est.delta_hat = INFINITY;
  for (std::size_t i = 0; i < directions.size(); ++i) {
    auto& d = est.directions[i];
    for (std::size_t k = 0; k < n_scales; ++k) d.mean.push_back(mean_of(d.ratios[k]));
    d.per_omega.resize(n_omega);
    for (std::size_t j = 0; j < n_omega; ++j) {
      if (options.extrapolate && n_scales >= 2) {
        const double t1 = scales[n_scales - 2];
        const double t2 = scales[n_scales - 1];
        const double r1 = d.ratios[n_scales - 2][j];
        const double r2 = d.ratios[n_scales - 1][j];
        d.per_omega[j] = (t2 * r2 - t1 * r1) / (t2 - t1);
      } else {
        d.per_omega[j] = d.ratios[n_scales - 1][j];
      }
      if (touched[i * n_omega + j]) d.touched_boundary = true;
    }
    d.phi = mean_of(d.per_omega);
    d.spread = stddev_of(d.per_omega);
    est.delta_hat = std::min(est.delta_hat, d.phi);
  }
  return est;
}

CriticalValues stationary_critical_value(const Hamiltonian& hamiltonian, const CriticalOptions& options) {
  check_options(options.norm);
  if (!(options.tol > 0.0)) throw ConfigError("tolerance must be positive");
  CriticalValues out;
  const OmegaPoint omega0 = hamiltonian.env().sample_omega(0);
  out.free = free_critical_value(hamiltonian, omega0, options.free_box, options.norm.graph, options.tol);

  double lo = out.free.hi;
  double hi = std::max(hamiltonian.coercivity().beta(0.0) + 1.0, lo + 1.0);
  const double t_max = *std::max_element(options.norm.scales.begin(), options.norm.scales.end());
  out.theta = options.theta.value_or(5.0 * hamiltonian.kappa(hi) * options.norm.graph.h / t_max);

  std::map<double, StableNormEstimate> cache;
  auto estimate = [&](double a) -> const StableNormEstimate& {
    auto it = cache.find(a);
    if (it == cache.end()) {
      ++out.nondegeneracy_evaluations;
      it = cache.emplace(a, stable_norm(hamiltonian, a, options.directions, options.norm)).first;
    }
    return it->second;
  };
  // A level below the pointwise minimum somewhere in a window lies below c.
  auto nondegenerate = [&](double a) {
    try {
      return estimate(a).delta_hat >= out.theta;
    } catch (const EmptySublevel&) {
      return false;
    }
  };

  if (nondegenerate(lo)) {
    out.stationary = {out.free.lo, lo, 0};
  } else {
    int doublings = 0;
    while (!nondegenerate(hi)) {
      lo = hi;
      hi = 2.0 * hi + 1.0;
      if (++doublings > 30) throw Error("no nondegenerate level found");
    }
    int iterations = 0;
    while (hi - lo > options.tol) {
      const double mid = 0.5 * (lo + hi);
      if (nondegenerate(mid)) {
        hi = mid;
      } else {
        lo = mid;
      }
      ++iterations;
    }
    out.stationary = {lo, hi, iterations};
  }

  try {
    out.at_critical = estimate(std::max(out.stationary.lo, out.free.hi));
  } catch (const EmptySublevel&) {
    out.at_critical = estimate(out.stationary.hi);
  }
  const double cutoff = options.degeneracy_cutoff.value_or(out.theta);
  for (const auto& d : out.at_critical.directions) {
    if (d.phi < cutoff) out.degenerate_directions.push_back(d.direction);
    if (d.phi < -std::max(d.spread, 1e-12)) out.nonnegative_at_critical = false;
  }
  return out;
}

KingmanReport kingman_diagnostics(const Hamiltonian& hamiltonian, double level, const Vec& q, int n_max,
                                  const StableNormOptions& options) {
  check_options(options);
  if (n_max < 1) throw ConfigError("n_max must be positive");
  std::vector<int> ns;
  for (int n = 1; n <= n_max; n *= 2) ns.push_back(n);
  const auto n_omega = static_cast<std::size_t>(options.omega_count);
  const double h = options.graph.h;
  const double reach = static_cast<double>(ns.back());
  const Box box = snapped_box(hamiltonian.dim(), {reach * q}, padding(options, reach), h);

  std::vector<std::vector<double>> ratios(ns.size(), std::vector<double>(n_omega, 0.0));
  std::vector<int> violations(n_omega, 0);
  std::vector<int> checks(n_omega, 0);
  GraphOptions inner = options.graph;
  inner.jobs = 1;
  parallel_for(n_omega, options.jobs, [&](std::size_t j) {
    const MetricGraph graph(hamiltonian, box, level, hamiltonian.env().sample_omega(j), inner);
    std::vector<int> nodes;
    for (int n : ns) nodes.push_back(graph.grid().nearest(static_cast<double>(n) * q));
    const int origin = graph.grid().nearest({0.0, 0.0});
    const DistanceField from_origin = shortest_distances(graph, origin);
    for (std::size_t k = 0; k < ns.size(); ++k) {
      ratios[k][j] = from_origin.value(nodes[k]) / ns[k];
    }
    for (std::size_t k = 0; k + 1 < ns.size(); ++k) {
      const DistanceField from_mid = shortest_distances(graph, nodes[k]);
      const auto far = static_cast<std::size_t>(nodes[k + 1]);
      const auto mid = static_cast<std::size_t>(nodes[k]);
      ++checks[j];
      if (from_origin.ticks[far] > from_origin.ticks[mid] + from_mid.ticks[far]) ++violations[j];
    }
  });

  KingmanReport report;
  for (std::size_t k = 0; k < ns.size(); ++k) {
    report.rows.push_back({ns[k], mean_of(ratios[k]), stddev_of(ratios[k])});
  }
  for (std::size_t k = 0; k + 1 < ns.size(); ++k) {
    const double se = std::hypot(report.rows[k].stddev, report.rows[k + 1].stddev) /
                      std::sqrt(static_cast<double>(n_omega));
    if (report.rows[k + 1].mean > report.rows[k].mean + 3.0 * se + 1e-12) report.nonincreasing = false;
  }
  for (std::size_t j = 0; j < n_omega; ++j) {
    report.subadditivity_checks += checks[j];
    if (violations[j] > 0) report.subadditive = false;
  }
  return report;
}

}  // namespace hjm
