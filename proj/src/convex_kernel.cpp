#include "hjm/convex_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "hjm/errors.hpp"

namespace hjm {
namespace {

// Relative slack for rounding in a + V^2 when the level sits exactly at -V^2.
double level_slack(double a) { return 1e-12 * std::max(1.0, std::abs(a)); }

void require_nonempty(double a, double v2) {
  if (a + v2 < -level_slack(a)) throw EmptySublevel(a, -v2);
}

}  // namespace

SublevelGeometry::SublevelGeometry(Hamiltonian hamiltonian, double level, int polar_directions)
    : hamiltonian_(std::move(hamiltonian)),
      level_(level),
      kappa_(hamiltonian_.kappa(level)),
      polar_directions_(polar_directions) {
  if (polar_directions_ < 4) throw ConfigError("polar direction count must be at least 4");
}

double SublevelGeometry::support(const LocalData& local, const Vec& q) const {
  require_nonempty(level_, local.v2);
  return dot(local.center, q) + norm(q) * std::sqrt(std::max(level_ + local.v2, 0.0));
}

double SublevelGeometry::support(const Vec& x, const Vec& q, const OmegaPoint& omega) const {
  return support(hamiltonian_.local(x, omega), q);
}

double SublevelGeometry::support_polar(const Vec& x, const Vec& q, const OmegaPoint& omega) const {
  const Vec center = hamiltonian_.minimizer(x, omega);
  const double floor_value = hamiltonian_.eval(x, center, omega);
  require_nonempty(level_, -floor_value);

  const int count = hamiltonian_.dim() == 1 ? 2 : polar_directions_;
  double best = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < count; ++j) {
    const double angle = 2.0 * kPi * j / count;
    const Vec u = hamiltonian_.dim() == 1 ? Vec{j == 0 ? 1.0 : -1.0, 0.0}
                                          : Vec{std::cos(angle), std::sin(angle)};
    double lo = 0.0;
    double hi = std::max(1.0, kappa_);
    while (hamiltonian_.eval(x, center + hi * u, omega) <= level_) hi *= 2.0;
    for (int it = 0; it < 80; ++it) {
      double mid = 0.5 * (lo + hi);
      if (hamiltonian_.eval(x, center + mid * u, omega) <= level_) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    best = std::max(best, dot(q, center + lo * u));
  }
  return best;
}

double sublevel_gap(const Hamiltonian& hamiltonian, double a, double b) {
  if (b < a) throw Error("sublevel_gap needs a <= b");
  // Balls with a common center and radii sqrt(level + V^2); the radius gap
  // shrinks as V grows, so the worst case is V = sup V.
  const double w = hamiltonian.potential().bound();
  return std::sqrt(std::max(b + w * w, 0.0)) - std::sqrt(std::max(a + w * w, 0.0));
}

double Lagrangian::value(const Vec& x, const Vec& q, const OmegaPoint& omega) const {
  return value(hamiltonian_.local(x, omega), q);
}

double sigma_from_lagrangian(const Lagrangian& lagrangian, double a, const Vec& x, const Vec& q,
                             const OmegaPoint& omega) {
  const LocalData local = lagrangian.hamiltonian().local(x, omega);
  require_nonempty(a, local.v2);
  const double qn = norm(q);
  if (qn == 0.0) return 0.0;

  // lambda = exp(s) / |q|; the objective is unimodal in s.
  auto objective = [&](double s) {
    const double lambda = std::exp(s) / qn;
    return (Lagrangian::value(local, lambda * q) + a) / lambda;
  };
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = -60.0;
  double hi = 60.0;
  double s1 = hi - ratio * (hi - lo);
  double s2 = lo + ratio * (hi - lo);
  double f1 = objective(s1);
  double f2 = objective(s2);
  for (int it = 0; it < 200; ++it) {
    if (f1 <= f2) {
      hi = s2;
      s2 = s1;
      f2 = f1;
      s1 = hi - ratio * (hi - lo);
      f1 = objective(s1);
    } else {
      lo = s1;
      s1 = s2;
      f1 = f2;
      s2 = lo + ratio * (hi - lo);
      f2 = objective(s2);
    }
  }
  return std::min(f1, f2);
}

LagrangianTable LagrangianTable::build(const Lagrangian& lagrangian, const Vec& x, const OmegaPoint& omega,
                                       double radius, double step) {
  if (!(step > 0.0) || !(radius > 0.0)) throw ConfigError("velocity grid needs positive radius and step");
  LagrangianTable table;
  table.x = x;
  table.omega = omega;
  const LocalData local = lagrangian.hamiltonian().local(x, omega);
  const long n = static_cast<long>(std::floor(radius / step + 1e-9));
  const long m = lagrangian.hamiltonian().dim() == 1 ? 0 : n;
  for (long i = -n; i <= n; ++i) {
    for (long j = -m; j <= m; ++j) {
      Vec q{static_cast<double>(i) * step, static_cast<double>(j) * step};
      table.velocities.push_back(q);
      table.values.push_back(Lagrangian::value(local, q));
    }
  }
  return table;
}

double LagrangianTable::conjugate(const Vec& p) const {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < velocities.size(); ++i) best = std::max(best, dot(p, velocities[i]) - values[i]);
  return best;
}

void LagrangianTable::write_csv(std::ostream& os) const {
  os << "q1 (velocity),q2 (velocity),L (action/time)\n";
  for (std::size_t i = 0; i < velocities.size(); ++i) {
    os << velocities[i][0] << ',' << velocities[i][1] << ',' << values[i] << '\n';
  }
}

}  // namespace hjm
