#include "hjm/effective.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "hjm/errors.hpp"
#include "hjm/metric_graph.hpp"
#include "hjm/parallel.hpp"

namespace hjm {
namespace {

Box padded_lattice_box(const Box& targets, double pad, double h) {
  Box b;
  b.dim = targets.dim;
  for (int a = 0; a < targets.dim; ++a) {
    const auto ax = static_cast<std::size_t>(a);
    b.lo[ax] = std::floor((std::min(targets.lo[ax], 0.0) - pad) / h) * h;
    b.hi[ax] = std::ceil((std::max(targets.hi[ax], 0.0) + pad) / h) * h;
  }
  return b;
}

Box scaled(const Box& b, double s) {
  Box out = b;
  out.lo = s * b.lo;
  out.hi = s * b.hi;
  return out;
}

bool inside_with_slack(const Box& b, const Vec& x, double slack) {
  for (int a = 0; a < b.dim; ++a) {
    const auto ax = static_cast<std::size_t>(a);
    if (x[ax] < b.lo[ax] - slack || x[ax] > b.hi[ax] + slack) return false;
  }
  return true;
}

}  // namespace

int SquareGrid::per_axis() const {
  if (!(step > 0.0) || !(hi >= lo)) throw ConfigError("square grid needs step > 0 and lo <= hi");
  return static_cast<int>(std::round((hi - lo) / step)) + 1;
}

std::vector<Vec> SquareGrid::points() const {
  const int n = per_axis();
  std::vector<Vec> out;
  const int ny = dim > 1 ? n : 1;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < n; ++i) out.push_back({lo + step * i, dim > 1 ? lo + step * j : 0.0});
  }
  return out;
}

bool SquareGrid::on_edge(int k) const {
  const int n = per_axis();
  const int i = k % n;
  const int j = k / n;
  if (i == 0 || i == n - 1) return true;
  return dim > 1 && (j == 0 || j == n - 1);
}

double ActionField::value_at(const Vec& y) const {
  const int node = grid.nearest(y);
  if (node < 0) throw Error("point outside the action grid");
  return value(node);
}

std::vector<ActionField> action_values(const Hamiltonian& hamiltonian, const OmegaPoint& omega, double horizon,
                                       const Box& targets, const ActionOptions& options,
                                       const std::vector<int>& snapshot_steps) {
  if (!(horizon > 0.0) || !(options.dt > 0.0) || !(options.h > 0.0)) {
    throw ConfigError("horizon, dt and h must be positive");
  }
  if (options.reach < 1) throw ConfigError("reach must be at least 1");
  if (targets.dim != hamiltonian.dim()) throw ConfigError("target box dimension differs from the Hamiltonian's");
  const int steps = std::max(1, static_cast<int>(std::lround(horizon / options.dt)));
  const Grid grid(padded_lattice_box(targets, options.margin, options.h), options.h);
  const HalfGridSamples samples(hamiltonian, grid, omega, options.jobs);
  const bool drift = hamiltonian.spec().form == HamiltonianForm::eikonal_drift;
  const Vec shift = hamiltonian.spec().shift;
  const double dt = options.dt;
  const double h = options.h;
  const int r = options.reach;
  const int dim = grid.dim();

  struct Step {
    int di, dj;
    Ticks kinetic;
    Vec displacement;
    bool rim;
  };
  std::vector<Step> stencil;
  for (int dj = dim > 1 ? -r : 0; dj <= (dim > 1 ? r : 0); ++dj) {
    for (int di = -r; di <= r; ++di) {
      const Vec s{h * di, h * dj};
      const Vec v = (1.0 / dt) * s;
      const Ticks kinetic = to_ticks(dt * (0.25 * dot(v, v) - dot(shift, v)));
      stencil.push_back({di, dj, kinetic, s, std::max(std::abs(di), std::abs(dj)) == r});
    }
  }
  std::vector<Ticks> potential_ticks(static_cast<std::size_t>(samples.extent(0)) *
                                     static_cast<std::size_t>(samples.extent(1)));
  for (std::size_t s = 0; s < potential_ticks.size(); ++s) {
    potential_ticks[s] = to_ticks(dt * samples.v2(static_cast<int>(s)));
  }

  const int n0 = grid.extent(0);
  const int n1 = grid.extent(1);
  const int origin = grid.nearest({0.0, 0.0});
  auto [oi, oj] = grid.coords(origin);
  std::vector<Ticks> cur(static_cast<std::size_t>(grid.size()), kUnreached);
  std::vector<Ticks> next(cur.size(), kUnreached);
  std::vector<short> choice(cur.size(), -1);
  cur[static_cast<std::size_t>(origin)] = 0;

  std::vector<ActionField> out;
  auto snapshot = [&](int k) {
    ActionField f;
    f.grid = grid;
    f.steps = k;
    f.horizon = k * dt;
    f.ticks = cur;
    const Box region = scaled(targets, static_cast<double>(k) / steps);
    long long reached = 0;
    long long rim = 0;
    for (int node = 0; node < grid.size(); ++node) {
      if (cur[static_cast<std::size_t>(node)] >= kUnreached) continue;
      if (!inside_with_slack(region, grid.point(node), 1e-9 * (1.0 + horizon))) continue;
      ++reached;
      const short c = choice[static_cast<std::size_t>(node)];
      if (c >= 0 && stencil[static_cast<std::size_t>(c)].rim) ++rim;
    }
    f.rim_fraction = reached > 0 ? static_cast<double>(rim) / static_cast<double>(reached) : 0.0;
    if (f.rim_fraction > options.cfl_fraction) {
      throw CflViolation("stencil too small: " + std::to_string(f.rim_fraction * 100.0) +
                         "% of target nodes step on the stencil rim at t = " + std::to_string(f.horizon));
    }
    out.push_back(std::move(f));
  };

  for (int k = 1; k <= steps; ++k) {
    const int cone = k * r;
    const int i_lo = std::max(0, oi - cone);
    const int i_hi = std::min(n0 - 1, oi + cone);
    const int j_lo = std::max(0, oj - cone);
    const int j_hi = std::min(n1 - 1, oj + cone);
    parallel_for(static_cast<std::size_t>(j_hi - j_lo + 1), options.jobs, [&](std::size_t row) {
      const int j = j_lo + static_cast<int>(row);
      for (int i = i_lo; i <= i_hi; ++i) {
        Ticks best = kUnreached;
        short best_k = -1;
        for (std::size_t m = 0; m < stencil.size(); ++m) {
          const Step& st = stencil[m];
          const int pi = i - st.di;
          const int pj = j - st.dj;
          if (!grid.in_range(pi, pj)) continue;
          const Ticks prev = cur[static_cast<std::size_t>(grid.index(pi, pj))];
          if (prev >= kUnreached) continue;
          const int mid = samples.index(2 * i - st.di, 2 * j - st.dj);
          Ticks c = prev + st.kinetic + potential_ticks[static_cast<std::size_t>(mid)];
          if (drift) c += to_ticks(dot(samples.center(mid), st.displacement));
          if (c < best) {
            best = c;
            best_k = static_cast<short>(m);
          }
        }
        const auto node = static_cast<std::size_t>(grid.index(i, j));
        next[node] = best;
        choice[node] = best_k;
      }
    });
    std::swap(cur, next);
    if (std::find(snapshot_steps.begin(), snapshot_steps.end(), k) != snapshot_steps.end() && k != steps) {
      snapshot(k);
    }
  }
  snapshot(steps);
  return out;
}

ActionField action_value(const Hamiltonian& hamiltonian, const OmegaPoint& omega, double horizon,
                         const Box& targets, const ActionOptions& options) {
  return action_values(hamiltonian, omega, horizon, targets, options, {}).back();
}

void LagrangianBar::write_csv(std::ostream& os) const {
  os << "q1 (velocity),q2 (velocity),Lbar (action/time),half_horizon (action/time),full_horizon (action/time),"
        "spread (action/time)\n";
  for (std::size_t k = 0; k < q.size(); ++k) {
    os << q[k][0] << ',' << q[k][1] << ',' << value[k] << ',' << at_half[k] << ',' << at_full[k] << ','
       << spread[k] << '\n';
  }
}

LagrangianBar effective_lagrangian(const Hamiltonian& hamiltonian, const SquareGrid& velocities, double horizon,
                                   const EffectiveOptions& options) {
  if (options.omega_count < 1) throw ConfigError("omega_count must be positive");
  if (velocities.dim != hamiltonian.dim()) throw ConfigError("velocity grid dimension differs");
  LagrangianBar out;
  out.grid = velocities;
  out.q = velocities.points();
  const std::size_t nq = out.q.size();
  const int steps = std::max(2, static_cast<int>(std::lround(horizon / options.action.dt)));
  const int half_steps = steps / 2;
  const double t_full = steps * options.action.dt;
  const double t_half = half_steps * options.action.dt;
  out.horizon = t_full;

  Box targets;
  targets.dim = velocities.dim;
  for (int a = 0; a < velocities.dim; ++a) {
    targets.lo[static_cast<std::size_t>(a)] = t_full * velocities.lo;
    targets.hi[static_cast<std::size_t>(a)] = t_full * velocities.hi;
  }

  const auto n_omega = static_cast<std::size_t>(options.omega_count);
  std::vector<std::vector<double>> half(n_omega, std::vector<double>(nq));
  std::vector<std::vector<double>> full(n_omega, std::vector<double>(nq));
  for (std::size_t j = 0; j < n_omega; ++j) {
    const auto fields = action_values(hamiltonian, hamiltonian.env().sample_omega(j), t_full, targets,
                                      options.action, {half_steps});
    for (std::size_t k = 0; k < nq; ++k) {
      half[j][k] = fields.front().value_at(t_half * out.q[k]) / t_half;
      full[j][k] = fields.back().value_at(t_full * out.q[k]) / t_full;
    }
  }

  out.at_half.assign(nq, 0.0);
  out.at_full.assign(nq, 0.0);
  out.value.assign(nq, 0.0);
  out.spread.assign(nq, 0.0);
  for (std::size_t k = 0; k < nq; ++k) {
    std::vector<double> est(n_omega);
    for (std::size_t j = 0; j < n_omega; ++j) {
      out.at_half[k] += half[j][k] / static_cast<double>(n_omega);
      out.at_full[k] += full[j][k] / static_cast<double>(n_omega);
      est[j] = options.extrapolate ? (t_full * full[j][k] - t_half * half[j][k]) / (t_full - t_half) : full[j][k];
    }
    double m = 0.0;
    for (double e : est) m += e / static_cast<double>(n_omega);
    double v = 0.0;
    for (double e : est) v += (e - m) * (e - m);
    out.value[k] = m;
    out.spread[k] = n_omega > 1 ? std::sqrt(v / static_cast<double>(n_omega - 1)) : 0.0;
  }
  return out;
}

double HamiltonianBar::min_value() const { return *std::min_element(value.begin(), value.end()); }

Vec HamiltonianBar::argmin() const {
  return p[static_cast<std::size_t>(std::min_element(value.begin(), value.end()) - value.begin())];
}

void HamiltonianBar::write_csv(std::ostream& os) const {
  os << "P1 (momentum),P2 (momentum),Hbar (action/time),q1* (velocity),q2* (velocity)\n";
  for (std::size_t k = 0; k < p.size(); ++k) {
    os << p[k][0] << ',' << p[k][1] << ',' << value[k] << ',' << maximizer[k][0] << ',' << maximizer[k][1] << '\n';
  }
}

HamiltonianBar effective_hamiltonian(const LagrangianBar& lagrangian, const SquareGrid& momenta) {
  if (momenta.dim != lagrangian.grid.dim) throw ConfigError("momentum grid dimension differs");
  HamiltonianBar out;
  out.grid = momenta;
  out.p = momenta.points();
  for (const Vec& p : out.p) {
    double best = -INFINITY;
    std::size_t arg = 0;
    for (std::size_t k = 0; k < lagrangian.q.size(); ++k) {
      const double v = dot(p, lagrangian.q[k]) - lagrangian.value[k];
      if (v > best) {
        best = v;
        arg = k;
      }
    }
    if (lagrangian.grid.on_edge(static_cast<int>(arg))) {
      throw BoundaryMax("Legendre maximizer on the velocity-grid edge at P = (" + std::to_string(p[0]) + ", " +
                        std::to_string(p[1]) + ")");
    }
    out.value.push_back(best);
    out.maximizer.push_back(lagrangian.q[arg]);
  }
  return out;
}

CriticalValues shifted_critical_value(const Hamiltonian& hamiltonian, const Vec& shift,
                                      const CriticalOptions& options) {
  return stationary_critical_value(hamiltonian.with_shift(shift), options);
}

double sigma_bar(const HamiltonianBar& table, double level, const Vec& q, double tol) {
  const double lowest = table.min_value();
  if (level < lowest - tol) {
    throw EmptyEffectiveSublevel("level " + std::to_string(level) + " below min of the effective Hamiltonian " +
                                 std::to_string(lowest));
  }
  const int n = table.grid.per_axis();
  const int ny = table.grid.dim > 1 ? n : 1;
  double best = -INFINITY;
  auto consider_edge = [&](std::size_t a, std::size_t b) {
    const double ha = table.value[a];
    const double hb = table.value[b];
    if ((ha <= level) == (hb <= level)) return;
    const double t = (level - ha) / (hb - ha);
    const Vec p = table.p[a] + t * (table.p[b] - table.p[a]);
    best = std::max(best, dot(q, p));
  };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(j * n + i);
      if (table.value[k] <= level) best = std::max(best, dot(q, table.p[k]));
      if (i + 1 < n) consider_edge(k, k + 1);
      if (j + 1 < ny) consider_edge(k, k + static_cast<std::size_t>(n));
    }
  }
  if (best == -INFINITY) best = dot(q, table.argmin());
  return best;
}

}  // namespace hjm
