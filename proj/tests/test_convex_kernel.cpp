#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"

#include "hjm/convex_kernel.hpp"
#include "hjm/errors.hpp"
#include "support.hpp"

using namespace hjm;
using hjm::test::constant_potential;
using hjm::test::product_example;

TEST_CASE("support function closed forms") {
  const OmegaPoint w = constant_potential(0.0).env().origin();
  CHECK(SublevelGeometry(constant_potential(0.0), 4.0).support({0.0, 0.0}, {1.0, 0.0}, w) == 2.0);
  CHECK(SublevelGeometry(constant_potential(3.0), 0.0).support({0.0, 0.0}, {0.0, 2.0}, w) == 6.0);
  CHECK(SublevelGeometry(constant_potential(3.0), 0.0).support({0.0, 0.0}, {0.0, 0.0}, w) == 0.0);
  CHECK_THROWS_AS(SublevelGeometry(constant_potential(1.0), -2.0).support({0.0, 0.0}, {1.0, 0.0}, w),
                  EmptySublevel);
}

TEST_CASE("kappa bounds every sublevel momentum") {
  const Hamiltonian ex = product_example();
  const double a = 2.0;
  const double kappa = SublevelGeometry(ex, a).kappa();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  int inside = 0;
  for (int k = 0; k < 20000; ++k) {
    const OmegaPoint om = ex.env().sample_omega(static_cast<std::uint64_t>(k % 8));
    const Vec x{u(rng), u(rng)};
    const Vec p{u(rng), u(rng)};
    if (ex.eval(x, p, om) <= a) {
      ++inside;
      CHECK(norm(p) <= kappa);
    }
  }
  CHECK(inside > 100);
}

TEST_CASE("Lagrangian values") {
  const OmegaPoint w = constant_potential(1.0).env().origin();
  CHECK(Lagrangian(constant_potential(1.0)).value({0.0, 0.0}, {0.0, 0.0}, w) == 1.0);
  CHECK(Lagrangian(constant_potential(0.0)).value({0.0, 0.0}, {2.0, 0.0}, w) == 1.0);

  const Hamiltonian ex = product_example();
  const OmegaPoint om = ex.env().sample_omega(0);
  const Lagrangian lag(ex);
  for (const Vec x : {Vec{0.4, 0.1}, Vec{-1.3, 2.2}}) {
    for (const Vec q : {Vec{0.5, 0.0}, Vec{-1.0, 0.75}}) {
      const double kappa = ex.kappa(10.0);
      double brute = -INFINITY;
      const double step = 0.01;
      for (double px = -2 * kappa; px <= 2 * kappa; px += step) {
        for (double py = -2 * kappa; py <= 2 * kappa; py += step) {
          brute = std::max(brute, px * q[0] + py * q[1] - ex.eval(x, {px, py}, om));
        }
      }
      CHECK(std::abs(lag.value(x, q, om) - brute) <= 1e-3);
    }
  }
}

TEST_CASE("sigma from the Lagrangian") {
  const OmegaPoint w = constant_potential(0.0).env().origin();
  CHECK(sigma_from_lagrangian(Lagrangian(constant_potential(0.0)), 1.0, {0.0, 0.0}, {1.0, 0.0}, w) ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(sigma_from_lagrangian(Lagrangian(constant_potential(2.0)), -4.0, {0.0, 0.0}, {0.6, 0.8}, w) ==
        doctest::Approx(0.0).epsilon(1e-9));
  CHECK(SublevelGeometry(constant_potential(2.0), -4.0).support({0.0, 0.0}, {0.6, 0.8}, w) == 0.0);
}

TEST_CASE("closed form, Lagrangian route and polar route agree") {
  const Hamiltonian ex = product_example();
  const Hamiltonian drift({TorusEnvironment::product_flow(golden_ratio(), 4), HamiltonianForm::eikonal_drift,
                           {PotentialKind::product_quasiperiodic, {}},
                           {{0.0, 1, 0, 0, 0, 0.5, 0.0}, {0.2, 0, 0, 1, 0, 0.0, 0.3}},
                           {0.3, -0.1}});
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (const Hamiltonian* h : {&ex, &drift}) {
    const double a = 0.5;
    const SublevelGeometry geom(*h, a);
    const Lagrangian lag(*h);
    for (int k = 0; k < 1000; ++k) {
      const OmegaPoint om = h->env().sample_omega(static_cast<std::uint64_t>(k % 8));
      const Vec x{u(rng), u(rng)};
      const Vec q{u(rng) / 5.0, u(rng) / 5.0};
      const double closed = geom.support(x, q, om);
      CHECK(std::abs(sigma_from_lagrangian(lag, a, x, q, om) - closed) <= 1e-6 * std::max(1.0, std::abs(closed)));
      if (k % 20 == 0) CHECK(std::abs(geom.support_polar(x, q, om) - closed) <= 1e-3 * std::max(1.0, norm(q)));
    }
  }
}

TEST_CASE("nested sublevels with a quantitative gap") {
  const Hamiltonian ex = product_example();
  const double a = 0.0;
  const double b = 1.0;
  const double gap = sublevel_gap(ex, a, b);
  CHECK(gap > 0.0);
  const SublevelGeometry ga(ex, a);
  const SublevelGeometry gb(ex, b);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int k = 0; k < 1000; ++k) {
    const OmegaPoint om = ex.env().sample_omega(static_cast<std::uint64_t>(k % 8));
    const Vec x{u(rng), u(rng)};
    const Vec q{u(rng), u(rng)};
    CHECK(gb.support(x, q, om) >= ga.support(x, q, om) + gap * norm(q) - 1e-12);
  }
}

TEST_CASE("double transform of the Lagrangian table") {
  const Hamiltonian ex = product_example();
  const OmegaPoint om = ex.env().sample_omega(0);
  const Vec x{0.7, -0.2};
  const LagrangianTable table = LagrangianTable::build(Lagrangian(ex), x, om, 8.0, 0.05);
  for (const Vec p : {Vec{0.0, 0.0}, Vec{0.5, -0.5}, Vec{1.0, 0.25}}) {
    CHECK(std::abs(table.conjugate(p) - ex.eval(x, p, om)) <= 0.01);
  }
  std::ostringstream os;
  table.write_csv(os);
  CHECK(os.str().rfind("q1 (velocity)", 0) == 0);
}
