#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"

#include "hjm/asymptotics.hpp"
#include "hjm/errors.hpp"
#include "support.hpp"

using namespace hjm;
using hjm::test::constant_potential;
using hjm::test::graph_opts;
using hjm::test::product_example;
using hjm::test::sine_1d;

namespace {

StableNormOptions norm_opts(double h, int radius, std::vector<double> scales, int omegas) {
  StableNormOptions o;
  o.graph = graph_opts(h, radius);
  o.scales = std::move(scales);
  o.omega_count = omegas;
  return o;
}

}  // namespace

TEST_CASE("equispaced directions") {
  const auto d8 = equispaced_directions(8, 2);
  REQUIRE(d8.size() == 8);
  for (const Vec& q : d8) CHECK(norm(q) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(d8[0][0] == 1.0);
  const auto d1 = equispaced_directions(16, 1);
  REQUIRE(d1.size() == 2);
  CHECK(d1[0][0] == 1.0);
  CHECK(d1[1][0] == -1.0);
}

TEST_CASE("free metric stable norm is Euclidean") {
  const Hamiltonian h = constant_potential(0.0);
  const StableNormEstimate est =
      stable_norm(h, 1.0, equispaced_directions(8, 2), norm_opts(0.1, 3, {5.0, 10.0, 20.0}, 1));
  for (const auto& d : est.directions) {
    CHECK(std::abs(d.phi - 1.0) <= 0.02);
    // The lattice metric overestimates Euclidean length by the stencil anisotropy.
    CHECK(d.phi <= est.kappa * 1.02);
  }
  double smallest = INFINITY;
  for (const auto& d : est.directions) smallest = std::min(smallest, d.phi);
  CHECK(est.delta_hat == doctest::Approx(smallest));
  std::ostringstream os;
  est.write_csv(os);
  CHECK(os.str().rfind("direction,angle (rad),T (length),omega,ratio (action/length)\n", 0) == 0);
}

TEST_CASE("one-dimensional stable norm") {
  const Hamiltonian s = sine_1d();
  StableNormOptions o = norm_opts(1e-3, 1, {1.0, 2.0}, 1);
  o.extrapolate = false;
  const StableNormEstimate est = stable_norm(s, 0.0, equispaced_directions(2, 1), o);
  for (const auto& d : est.directions) CHECK(std::abs(d.phi - 2.0 / kPi) <= 0.01 * 2.0 / kPi);
}

TEST_CASE("stable norm bounds, convexity and monotonicity on the product example") {
  const Hamiltonian ex = product_example();
  const StableNormOptions o = norm_opts(0.1, 2, {5.0, 10.0}, 4);
  const double r2 = std::sqrt(0.5);
  const std::vector<Vec> dirs{{1.0, 0.0}, {0.0, 1.0}, {r2, r2}};
  const StableNormEstimate lo = stable_norm(ex, 0.5, dirs, o);
  const StableNormEstimate hi = stable_norm(ex, 1.5, dirs, o);
  for (std::size_t k = 0; k < dirs.size(); ++k) {
    CHECK(lo.directions[k].phi <= lo.kappa);
    const double spread = lo.directions[k].spread + hi.directions[k].spread;
    CHECK(lo.directions[k].phi <= hi.directions[k].phi + spread);
  }
  // phi(e1 + e2) = sqrt(2) phi(diagonal) <= phi(e1) + phi(e2).
  const double spread = lo.directions[0].spread + lo.directions[1].spread + lo.directions[2].spread;
  CHECK(std::sqrt(2.0) * lo.directions[2].phi <= lo.directions[0].phi + lo.directions[1].phi + 2.0 * spread);
  CHECK(lo.at({0.0, 1.0}).direction[1] == 1.0);
}

TEST_CASE("stationary critical value for constant potentials") {
  CriticalOptions o;
  o.norm = norm_opts(0.1, 3, {10.0, 20.0}, 1);
  o.directions = equispaced_directions(8, 2);
  o.free_box = hjm::test::square(-3, 3);
  o.tol = 0.01;
  const CriticalValues one = stationary_critical_value(constant_potential(1.0), o);
  CHECK(one.stationary.lo <= -1.0);
  CHECK(one.stationary.hi >= -1.0);
  CHECK(one.stationary.width() <= 0.05);
  CHECK(one.free.hi >= -1.0);
  CHECK(one.nonnegative_at_critical);

  const CriticalValues zero = stationary_critical_value(constant_potential(0.0), o);
  CHECK(zero.stationary.lo <= 0.0);
  CHECK(zero.stationary.hi >= 0.0);
  CHECK(zero.stationary.width() <= 0.05);
}

TEST_CASE("Kingman diagnostics") {
  const Hamiltonian free = constant_potential(0.0);
  const KingmanReport flat = kingman_diagnostics(free, 4.0, {1.0, 0.0}, 16, norm_opts(0.1, 2, {1.0}, 2));
  REQUIRE(flat.rows.size() == 5);
  for (const auto& row : flat.rows) CHECK(row.mean == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(flat.subadditive);
  CHECK(flat.nonincreasing);

  StableNormOptions o = norm_opts(0.2, 2, {1.0}, 4);
  o.margin_fraction = 0.1;
  const KingmanReport ex = kingman_diagnostics(product_example(), 0.0, {1.0, 0.0}, 128, o);
  CHECK(ex.subadditive);
  CHECK(ex.subadditivity_checks == 4 * 7);
  const double m16 = ex.rows[4].mean;
  const double m128 = ex.rows[7].mean;
  CHECK(m128 <= 0.7 * m16);
}

TEST_CASE("invalid stable norm options") {
  StableNormOptions o = norm_opts(0.1, 2, {}, 1);
  CHECK_THROWS_AS(stable_norm(constant_potential(0.0), 1.0, {{1.0, 0.0}}, o), ConfigError);
  o.scales = {5.0};
  o.omega_count = 0;
  CHECK_THROWS_AS(stable_norm(constant_potential(0.0), 1.0, {{1.0, 0.0}}, o), ConfigError);
}
