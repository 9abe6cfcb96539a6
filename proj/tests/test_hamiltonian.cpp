#include <cmath>
#include <random>

#include "doctest.h"

#include "hjm/errors.hpp"
#include "hjm/hamiltonian.hpp"
#include "support.hpp"

using namespace hjm;
using hjm::test::constant_potential;
using hjm::test::product_example;
using hjm::test::sine_1d;

TEST_CASE("eval on closed-form examples") {
  const OmegaPoint w0 = constant_potential(0.0).env().origin();
  CHECK(constant_potential(0.0).eval({0.5, 0.5}, {3.0, 4.0}, w0) == 25.0);
  CHECK(constant_potential(3.0).eval({1.0, -2.0}, {0.0, 0.0}, w0) == -9.0);

  const Hamiltonian ex = product_example();
  const OmegaPoint origin = ex.env().origin();
  CHECK(ex.potential_value({0.0, 0.0}, origin) == 0.0);
  CHECK(ex.eval({0.0, 0.0}, {1.5, -2.0}, origin) == doctest::Approx(6.25).epsilon(1e-15));
}

TEST_CASE("pointwise minimum") {
  const OmegaPoint w = constant_potential(2.0).env().origin();
  CHECK(constant_potential(0.0).pointwise_min({1.0, 1.0}, w) == 0.0);
  CHECK(constant_potential(2.0).pointwise_min({1.0, 1.0}, w) == -4.0);

  const Hamiltonian ex = product_example();
  const OmegaPoint om = ex.env().sample_omega(0);
  for (const Vec x : {Vec{0.3, -0.8}, Vec{2.1, 1.7}, Vec{-3.0, 0.4}}) {
    const double kappa = ex.kappa(ex.pointwise_min(x, om) + 1.0);
    double brute = INFINITY;
    const double step = 0.01;
    for (double px = -kappa; px <= kappa; px += step) {
      for (double py = -kappa; py <= kappa; py += step) brute = std::min(brute, ex.eval(x, {px, py}, om));
    }
    CHECK(ex.pointwise_min(x, om) <= brute);
    CHECK(brute - ex.pointwise_min(x, om) <= step * step);
  }
}

TEST_CASE("sup_pointwise_min") {
  const OmegaPoint w = constant_potential(1.5).env().origin();
  CHECK(constant_potential(1.5).sup_pointwise_min(w, hjm::test::square(-2, 2), 0.1) ==
        doctest::Approx(-2.25).epsilon(1e-14));

  const Hamiltonian s = sine_1d();
  const double m = s.sup_pointwise_min(s.env().origin(), hjm::test::segment(-0.5, 1.5), 0.125);
  CHECK(m <= 0.0);
  CHECK(m >= -1e-24);

  const Hamiltonian ex = product_example();
  const OmegaPoint om = ex.env().sample_omega(0);
  const double small = ex.sup_pointwise_min(om, hjm::test::square(-2, 2), 0.05);
  const double large = ex.sup_pointwise_min(om, hjm::test::square(-20, 20), 0.05);
  CHECK(small <= large);
  CHECK(large <= 0.0);
  CHECK(large >= -0.01);
}

TEST_CASE("stationarity of the potential") {
  // Dyadic data makes every phase exact, so the identity holds bitwise.
  const Hamiltonian dyadic = product_example(3, 1.5);
  const OmegaPoint w{{0.125, 0.5, 0.75, 0.0625}};
  const Hamiltonian ex = product_example(3);
  const OmegaPoint om = ex.env().sample_omega(2);
  for (int k = 0; k < 50; ++k) {
    const Vec x{0.25 * k - 3.0, 1.5 - 0.125 * k};
    const Vec z{-2.5 + 0.375 * (k % 7), 4.0 - 0.5 * (k % 5)};
    CHECK(dyadic.potential_value(x + z, w) == dyadic.potential_value(x, dyadic.env().translate(w, z)));
    const Vec xr{0.31 * k - 3.0, 1.7 - 0.13 * k};
    CHECK(ex.potential_value(xr + z, om) ==
          doctest::Approx(ex.potential_value(xr, ex.env().translate(om, z))).epsilon(1e-12));
  }
}

TEST_CASE("potential bounds") {
  const Hamiltonian ex = product_example();
  CHECK(ex.potential().bound() == 16.0);
  CHECK(ex.potential().torus_mean().value() == 4.0);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int k = 0; k < 1000; ++k) {
    const OmegaPoint om = ex.env().sample_omega(static_cast<std::uint64_t>(k % 10));
    const double v = ex.potential_value({u(rng), u(rng)}, om);
    CHECK(v >= 0.0);
    CHECK(v <= ex.potential().bound());
  }
  CHECK(sine_1d().potential().torus_mean().value() == doctest::Approx(2.0 / kPi).epsilon(1e-15));
  CHECK_THROWS_AS(Hamiltonian({TorusEnvironment::periodic(1, 1), HamiltonianForm::eikonal,
                               {PotentialKind::product_quasiperiodic, {}}, {}, {0.0, 0.0}}),
                  ConfigError);
}

TEST_CASE("convexity and coercivity on samples") {
  std::vector<Hamiltonian> hs{product_example(),
                              Hamiltonian({TorusEnvironment::product_flow(golden_ratio(), 4),
                                           HamiltonianForm::eikonal_drift,
                                           {PotentialKind::product_quasiperiodic, {}},
                                           {{0.0, 1, 0, 0, 0, 0.5, 0.0}, {0.2, 0, 0, 1, 0, 0.0, 0.3}},
                                           {0.3, -0.1}})};
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  std::uniform_real_distribution<double> t01(0.0, 1.0);
  for (const auto& h : hs) {
    const CoercivityBounds cb = h.coercivity();
    for (int k = 0; k < 500; ++k) {
      const OmegaPoint om = h.env().sample_omega(static_cast<std::uint64_t>(k % 8));
      const Vec x{u(rng), u(rng)};
      const Vec p{u(rng), u(rng)};
      const Vec q{u(rng), u(rng)};
      const double t = t01(rng);
      const Vec m = t * p + (1.0 - t) * q;
      CHECK(h.eval(x, m, om) <= t * h.eval(x, p, om) + (1.0 - t) * h.eval(x, q, om) + 1e-12);
      const double hp = h.eval(x, p, om);
      CHECK(cb.alpha(norm(p)) <= hp + 1e-12);
      CHECK(hp <= cb.beta(norm(p)) + 1e-12);
      CHECK(h.pointwise_min(x, om) == doctest::Approx(h.eval(x, h.minimizer(x, om), om)).epsilon(1e-12));
    }
  }
}

TEST_CASE("Lipschitz constant bounds difference quotients") {
  const Hamiltonian ex = product_example();
  const OmegaPoint om = ex.env().sample_omega(1);
  const double r = 3.0;
  const double lr = ex.lipschitz_constant(r);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-r / std::sqrt(2.0), r / std::sqrt(2.0));
  for (int k = 0; k < 500; ++k) {
    const Vec x{u(rng), u(rng)};
    const Vec p{u(rng), u(rng)};
    const Vec q{u(rng), u(rng)};
    CHECK(std::abs(ex.eval(x, p, om) - ex.eval(x, q, om)) <= lr * norm(p - q) + 1e-12);
  }
}

TEST_CASE("momentum shift") {
  const Hamiltonian h = constant_potential(1.0).with_shift({1.0, 0.0});
  const OmegaPoint w = h.env().origin();
  CHECK(h.eval({0.0, 0.0}, {0.0, 0.0}, w) == 0.0);
  CHECK(h.eval({0.0, 0.0}, {-1.0, 0.0}, w) == -1.0);
  CHECK(h.minimizer({0.0, 0.0}, w)[0] == -1.0);
}

TEST_CASE("form and kind names round trip") {
  for (auto k : {PotentialKind::product_quasiperiodic, PotentialKind::single_cosine_1d, PotentialKind::constant,
                 PotentialKind::user_trigonometric}) {
    CHECK(potential_kind_from_string(to_string(k)) == k);
  }
  for (auto f : {HamiltonianForm::eikonal, HamiltonianForm::eikonal_drift}) {
    CHECK(hamiltonian_form_from_string(to_string(f)) == f);
  }
  CHECK_THROWS_AS(potential_kind_from_string("nope"), ConfigError);
}
