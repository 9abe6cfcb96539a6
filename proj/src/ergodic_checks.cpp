#include "hjm/ergodic_checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "hjm/errors.hpp"
#include "hjm/parallel.hpp"

namespace hjm {
namespace {

std::vector<double> sorted_positive(std::vector<double> v, const char* what) {
  if (v.empty()) throw ConfigError(std::string(what) + " list is empty");
  for (double x : v) {
    if (!(x >= 0.0)) throw ConfigError(std::string(what) + " must be nonnegative");
  }
  std::sort(v.begin(), v.end());
  return v;
}

/// Lower envelope of parabolas (Felzenszwalb-Huttenlocher) along one line.
void edt_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v, std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  const double inf = std::numeric_limits<double>::infinity();
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[static_cast<std::size_t>(q)] == inf) continue;
    while (k >= 0) {
      const int p = v[static_cast<std::size_t>(k)];
      const double s = ((f[static_cast<std::size_t>(q)] + q * q) - (f[static_cast<std::size_t>(p)] + p * p)) /
                       (2.0 * (q - p));
      if (s <= z[static_cast<std::size_t>(k)]) {
        --k;
      } else {
        break;
      }
    }
    ++k;
    v[static_cast<std::size_t>(k)] = q;
    z[static_cast<std::size_t>(k)] =
        k == 0 ? -inf
               : ((f[static_cast<std::size_t>(q)] + q * q) -
                  (f[static_cast<std::size_t>(v[static_cast<std::size_t>(k - 1)])] +
                   v[static_cast<std::size_t>(k - 1)] * v[static_cast<std::size_t>(k - 1)])) /
                     (2.0 * (q - v[static_cast<std::size_t>(k - 1)]));
    z[static_cast<std::size_t>(k + 1)] = inf;
  }
  if (k < 0) {
    std::fill(d.begin(), d.end(), inf);
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[static_cast<std::size_t>(j + 1)] < q) ++j;
    const int p = v[static_cast<std::size_t>(j)];
    d[static_cast<std::size_t>(q)] = (q - p) * static_cast<double>(q - p) + f[static_cast<std::size_t>(p)];
  }
}

double mean_of(std::span<const double> v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::accepted: return "accepted";
    case Verdict::rejected: return "rejected";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

BirkhoffTable birkhoff_average(const TorusEnvironment& env, const TorusFunction& f, const OmegaPoint& omega,
                               std::span<const double> radii, double h, int jobs) {
  if (!(h > 0.0)) throw ConfigError("h must be positive");
  BirkhoffTable t;
  t.radii = sorted_positive({radii.begin(), radii.end()}, "radius");
  const std::size_t nr = t.radii.size();
  const int m = static_cast<int>(std::floor(t.radii.back() / h + 1e-9));
  const int dim = env.physical_dim();
  const int rows = dim > 1 ? 2 * m + 1 : 1;
  std::vector<std::vector<double>> sums(static_cast<std::size_t>(rows), std::vector<double>(nr, 0.0));
  std::vector<std::vector<long long>> counts(static_cast<std::size_t>(rows), std::vector<long long>(nr, 0));
  parallel_for(static_cast<std::size_t>(rows), jobs, [&](std::size_t row) {
    std::vector<double> theta(static_cast<std::size_t>(env.torus_dim()));
    const double y = dim > 1 ? h * (static_cast<int>(row) - m) : 0.0;
    for (int i = -m; i <= m; ++i) {
      const Vec x{h * i, y};
      const double r = norm(x);
      const auto bucket = static_cast<std::size_t>(
          std::lower_bound(t.radii.begin(), t.radii.end(), r - 1e-12 * (1.0 + r)) - t.radii.begin());
      if (bucket >= nr) continue;
      env.phases(omega, x, theta);
      sums[row][bucket] += f(theta);
      ++counts[row][bucket];
    }
  });
  double total = 0.0;
  long long count = 0;
  for (std::size_t k = 0; k < nr; ++k) {
    for (std::size_t row = 0; row < sums.size(); ++row) {
      total += sums[row][k];
      count += counts[row][k];
    }
    t.means.push_back(count > 0 ? total / static_cast<double>(count) : 0.0);
    t.counts.push_back(count);
  }
  return t;
}

bool StationarySet::contains(const Vec& x, const OmegaPoint& omega) const {
  std::vector<double> theta(static_cast<std::size_t>(env.torus_dim()));
  env.phases(omega, x, theta);
  const double v = field(theta);
  return v >= lo && v <= hi;
}

double SetSample::volume_fraction() const {
  if (inside.empty()) return 0.0;
  const auto c = std::count(inside.begin(), inside.end(), 1);
  return static_cast<double>(c) / static_cast<double>(inside.size());
}

SetSample sample_set(const StationarySet& set, const OmegaPoint& omega, const Box& window, double h, int jobs) {
  SetSample s;
  s.grid = Grid(window, h);
  s.inside.assign(static_cast<std::size_t>(s.grid.size()), 0);
  const int n0 = s.grid.extent(0);
  parallel_for(static_cast<std::size_t>(s.grid.extent(1)), jobs, [&](std::size_t j) {
    std::vector<double> theta(static_cast<std::size_t>(set.env.torus_dim()));
    for (int i = 0; i < n0; ++i) {
      const int node = s.grid.index(i, static_cast<int>(j));
      set.env.phases(omega, s.grid.point(node), theta);
      const double v = set.field(theta);
      s.inside[static_cast<std::size_t>(node)] = v >= set.lo && v <= set.hi ? 1 : 0;
    }
  });
  return s;
}

std::vector<double> distance_transform(const Grid& grid, const std::vector<char>& marked) {
  const int n0 = grid.extent(0);
  const int n1 = grid.extent(1);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> out(marked.size(), inf);
  const int longest = std::max(n0, n1);
  std::vector<double> f(static_cast<std::size_t>(longest));
  std::vector<double> d(static_cast<std::size_t>(longest));
  std::vector<int> v(static_cast<std::size_t>(longest));
  std::vector<double> z(static_cast<std::size_t>(longest) + 1);
  f.resize(static_cast<std::size_t>(n0));
  d.resize(static_cast<std::size_t>(n0));
  for (int j = 0; j < n1; ++j) {
    for (int i = 0; i < n0; ++i) f[static_cast<std::size_t>(i)] = marked[static_cast<std::size_t>(grid.index(i, j))] ? 0.0 : inf;
    edt_1d(f, d, v, z);
    for (int i = 0; i < n0; ++i) out[static_cast<std::size_t>(grid.index(i, j))] = d[static_cast<std::size_t>(i)];
  }
  if (n1 > 1) {
    f.resize(static_cast<std::size_t>(n1));
    d.resize(static_cast<std::size_t>(n1));
    for (int i = 0; i < n0; ++i) {
      for (int j = 0; j < n1; ++j) f[static_cast<std::size_t>(j)] = out[static_cast<std::size_t>(grid.index(i, j))];
      edt_1d(f, d, v, z);
      for (int j = 0; j < n1; ++j) out[static_cast<std::size_t>(grid.index(i, j))] = d[static_cast<std::size_t>(j)];
    }
  }
  return out;
}

void DensityTable::write_csv(std::ostream& os) const {
  os << "R (length),r (length),ratio (fraction)\n";
  for (std::size_t k = 0; k < big_radii.size(); ++k) {
    for (std::size_t m = 0; m < ball_radii.size(); ++m) {
      os << big_radii[k] << ',' << ball_radii[m] << ',' << ratio[k][m] << '\n';
    }
  }
}

DensityTable density_asymptotics(const StationarySet& set, const OmegaPoint& omega, std::vector<double> big_radii,
                                 std::vector<double> ball_radii, double h, int jobs) {
  DensityTable t;
  t.big_radii = sorted_positive(std::move(big_radii), "R");
  t.ball_radii = sorted_positive(std::move(ball_radii), "r");
  const int dim = set.env.physical_dim();
  const double reach = t.ball_radii.back() + t.big_radii.back();
  const int m = static_cast<int>(std::ceil(reach / h - 1e-9));
  Box window;
  window.dim = dim;
  for (int a = 0; a < dim; ++a) {
    window.lo[static_cast<std::size_t>(a)] = -m * h;
    window.hi[static_cast<std::size_t>(a)] = m * h;
  }
  const SetSample sample = sample_set(set, omega, window, h, jobs);
  if (std::find(sample.inside.begin(), sample.inside.end(), 1) == sample.inside.end()) {
    throw EmptySample("stationary set has no lattice point in the sampled window");
  }
  const std::vector<double> d2 = distance_transform(sample.grid, sample.inside);

  const std::size_t nk = t.big_radii.size();
  const std::size_t nm = t.ball_radii.size();
  std::vector<std::vector<long long>> hits(nk, std::vector<long long>(nm, 0));
  std::vector<long long> totals(nm, 0);
  for (int node = 0; node < sample.grid.size(); ++node) {
    const double r = norm(sample.grid.point(node));
    const double dist = std::sqrt(d2[static_cast<std::size_t>(node)]) * h;
    for (std::size_t mm = 0; mm < nm; ++mm) {
      if (r > t.ball_radii[mm] + 1e-12) continue;
      ++totals[mm];
      for (std::size_t k = 0; k < nk; ++k) {
        if (dist <= t.big_radii[k] + 1e-9 * h) ++hits[k][mm];
      }
    }
  }
  t.ratio.assign(nk, std::vector<double>(nm, 0.0));
  for (std::size_t k = 0; k < nk; ++k) {
    for (std::size_t mm = 0; mm < nm; ++mm) {
      t.ratio[k][mm] = totals[mm] > 0 ? static_cast<double>(hits[k][mm]) / static_cast<double>(totals[mm]) : 0.0;
      if (k > 0 && t.ratio[k][mm] < t.ratio[k - 1][mm]) t.monotone_in_R = false;
    }
  }
  for (double eps : t.epsilons) {
    std::optional<double> least;
    for (std::size_t k = 0; k < nk && !least; ++k) {
      if (t.ratio[k][nm - 1] >= 1.0 - eps) least = t.big_radii[k];
    }
    t.least_radius.push_back(least);
  }
  return t;
}

double AdmissibleCandidate::at(const Vec& x) const {
  const int node = grid.nearest(x);
  if (node < 0) throw Error("point outside the candidate grid");
  return u[static_cast<std::size_t>(node)];
}

double AdmissibleCandidate::profile(double r) const {
  if (!(r > 0.0)) throw ConfigError("profile radius must be positive");
  const double u0 = at({0.0, 0.0});
  double best = 0.0;
  bool any = false;
  for (int node = 0; node < grid.size(); ++node) {
    const double rho = norm(grid.point(node));
    if (std::abs(rho - r) > 0.5 * grid.h()) continue;
    any = true;
    best = std::max(best, std::abs(u[static_cast<std::size_t>(node)] - u0) / r);
  }
  if (!any) throw Error("no grid node on the ring of radius " + std::to_string(r));
  return best;
}

SublinearityReport sublinearity_test(const AdmissibleCandidate& candidate, std::span<const double> radii,
                                     const SublinearityOptions& options) {
  SublinearityReport rep;
  rep.radii = sorted_positive({radii.begin(), radii.end()}, "radius");
  if (rep.radii.size() < 2) throw ConfigError("sublinearity test needs at least two radii");
  for (double r : rep.radii) rep.profile.push_back(candidate.profile(r));
  std::vector<double> inv;
  for (double r : rep.radii) inv.push_back(1.0 / r);
  const double mx = mean_of(inv);
  const double my = mean_of(rep.profile);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < inv.size(); ++i) {
    sxy += (inv[i] - mx) * (rep.profile[i] - my);
    sxx += (inv[i] - mx) * (inv[i] - mx);
  }
  rep.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  const double first = rep.profile.front();
  const double last = rep.profile.back();
  if (rep.slope >= 0.0 && last < options.accept_ratio * first) {
    rep.verdict = Verdict::accepted;
  } else if (last >= options.reject_ratio * first) {
    rep.verdict = Verdict::rejected;
  } else {
    rep.verdict = Verdict::inconclusive;
  }
  return rep;
}

MeanIncrementReport mean_increment_test(std::span<const AdmissibleCandidate> ensemble, const Vec& x, const Vec& y) {
  if (ensemble.size() < 8) throw ConfigError("mean increment test needs at least 8 ensemble members");
  MeanIncrementReport rep;
  std::vector<double> inc;
  for (const auto& c : ensemble) inc.push_back(c.at(y) - c.at(x));
  rep.samples = static_cast<int>(inc.size());
  rep.mean = mean_of(inc);
  double v = 0.0;
  for (double d : inc) v += (d - rep.mean) * (d - rep.mean);
  v /= static_cast<double>(inc.size() - 1);
  rep.standard_error = std::sqrt(v / static_cast<double>(inc.size()));
  rep.verdict = std::abs(rep.mean) <= 3.0 * rep.standard_error ? Verdict::accepted : Verdict::rejected;
  return rep;
}

}  // namespace hjm
