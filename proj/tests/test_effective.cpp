#include <cmath>
#include <sstream>

#include "doctest.h"

#include "hjm/effective.hpp"
#include "hjm/errors.hpp"
#include "support.hpp"

using namespace hjm;
using hjm::test::constant_potential;
using hjm::test::graph_opts;
using hjm::test::product_example;
using hjm::test::square;

namespace {

ActionOptions exact_velocities(int reach) {
  ActionOptions o;
  o.h = 0.1;
  o.dt = 0.4;
  o.reach = reach;
  o.margin = 0.5;
  return o;
}

EffectiveOptions effective_opts(int reach) {
  EffectiveOptions o;
  o.action = exact_velocities(reach);
  o.omega_count = 1;
  return o;
}

}  // namespace

TEST_CASE("square grids") {
  const SquareGrid g{2, -1.0, 1.0, 0.5};
  CHECK(g.per_axis() == 5);
  const auto pts = g.points();
  REQUIRE(pts.size() == 25);
  CHECK(pts[1][0] == -0.5);
  CHECK(pts[1][1] == -1.0);
  CHECK(g.on_edge(0));
  CHECK_FALSE(g.on_edge(12));
  CHECK(SquareGrid{1, -1.0, 1.0, 0.5}.points().size() == 5);
}

TEST_CASE("free action is the straight-line optimum on lattice velocities") {
  const Hamiltonian h = constant_potential(0.0);
  const double t = 4.0;
  const ActionField f = action_value(h, h.env().origin(), t, square(-4, 4), exact_velocities(12));
  CHECK(f.steps == 10);
  for (const Vec y : {Vec{1.0, 0.0}, Vec{2.0, 1.0}, Vec{3.0, -2.0}, Vec{0.0, 4.0}, Vec{0.0, 0.0}}) {
    const double exact = dot(y, y) / (4.0 * t);
    CHECK(std::abs(f.value_at(y) - exact) <= 0.03 * exact + 1e-9);
  }
  CHECK(f.rim_fraction <= 0.01);
}

TEST_CASE("the O(1/T) endpoint bias halves when the horizon doubles") {
  const Hamiltonian h = constant_potential(0.0);
  const Vec q{0.5, 0.0};
  const Vec z{2.0, 0.0};
  std::vector<double> gaps;
  for (double t : {4.0, 8.0}) {
    const ActionField f = action_value(h, h.env().origin(), t, square(-1, t + 3), exact_velocities(8));
    gaps.push_back(std::abs(f.value_at(t * q + z) / t - dot(q, q) / 4.0));
  }
  CHECK(gaps[1] <= 0.5 * gaps[0]);
}

TEST_CASE("resting bounds the action") {
  const Hamiltonian ex = product_example();
  const double t = 2.0;
  ActionOptions o = exact_velocities(4);
  o.cfl_fraction = 1.0;
  const ActionField f = action_value(ex, ex.env().sample_omega(0), t, square(-0.5, 0.5), o);
  CHECK(f.value_at({0.0, 0.0}) <= t * ex.potential().bound() * ex.potential().bound());
}

TEST_CASE("too narrow a stencil is reported") {
  const Hamiltonian h = constant_potential(0.0);
  CHECK_THROWS_AS(action_value(h, h.env().origin(), 4.0, square(-4, 4), exact_velocities(3)), CflViolation);
}

TEST_CASE("effective Lagrangian and Hamiltonian for constant potentials") {
  for (double v : {0.0, 1.0}) {
    const Hamiltonian h = constant_potential(v);
    const SquareGrid qg{2, -2.0, 2.0, 0.25};
    const LagrangianBar lbar = effective_lagrangian(h, qg, 4.0, effective_opts(10));
    for (std::size_t k = 0; k < lbar.q.size(); ++k) {
      const double exact = dot(lbar.q[k], lbar.q[k]) / 4.0 + v * v;
      CHECK(std::abs(lbar.value[k] - exact) <= 0.03 * exact + 1e-9);
    }
    // Discrete midpoint convexity along the axis.
    for (std::size_t k = 1; k + 1 < static_cast<std::size_t>(qg.per_axis()); ++k) {
      CHECK(2.0 * lbar.value[k] <= lbar.value[k - 1] + lbar.value[k + 1] + 1e-9);
    }
    const HamiltonianBar hbar = effective_hamiltonian(lbar, SquareGrid{2, -0.75, 0.75, 0.25});
    for (std::size_t k = 0; k < hbar.p.size(); ++k) {
      CHECK(std::abs(hbar.value[k] - (dot(hbar.p[k], hbar.p[k]) - v * v)) <= 1e-6);
    }
    CHECK(hbar.min_value() == doctest::Approx(-v * v).epsilon(1e-9));
    CHECK(norm(hbar.argmin()) == 0.0);
    const double lbar0 = lbar.value[lbar.q.size() / 2];
    CHECK(-lbar0 == doctest::Approx(hbar.min_value()).epsilon(1e-12));
    const CriticalBracket cf =
        free_critical_value(h, h.env().origin(), square(-2, 2), graph_opts(0.1, 2), 0.01);
    CHECK(std::abs(hbar.min_value() - cf.estimate()) <= 0.02);

    std::ostringstream os;
    hbar.write_csv(os);
    CHECK(os.str().rfind("P1 (momentum)", 0) == 0);
    CHECK_THROWS_AS(effective_hamiltonian(lbar, SquareGrid{2, -1.5, 1.5, 0.5}), BoundaryMax);
  }
}

TEST_CASE("support function of effective sublevels") {
  const Hamiltonian h = constant_potential(1.0);
  const LagrangianBar lbar = effective_lagrangian(h, SquareGrid{2, -3.0, 3.0, 0.25}, 4.0, effective_opts(14));
  const HamiltonianBar hbar = effective_hamiltonian(lbar, SquareGrid{2, -1.25, 1.25, 0.25});
  for (const Vec q : {Vec{1.0, 0.0}, Vec{0.0, -2.0}, Vec{0.6, 0.8}}) {
    CHECK(std::abs(sigma_bar(hbar, 0.0, q) - norm(q)) <= 0.02 * norm(q));
  }
  CHECK(sigma_bar(hbar, -1.0, {1.0, 0.0}) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK_THROWS_AS(sigma_bar(hbar, -1.5, {1.0, 0.0}), EmptyEffectiveSublevel);

  const Hamiltonian free = constant_potential(0.0);
  const LagrangianBar lfree = effective_lagrangian(free, SquareGrid{2, -3.0, 3.0, 0.25}, 4.0, effective_opts(14));
  const HamiltonianBar hfree = effective_hamiltonian(lfree, SquareGrid{2, -1.25, 1.25, 0.25});
  for (const Vec q : {Vec{1.0, 0.0}, Vec{-0.6, 0.8}}) {
    CHECK(std::abs(sigma_bar(hfree, 1.0, q) - 1.0) <= 0.02);
  }
}

TEST_CASE("shifted critical values") {
  CriticalOptions o;
  o.norm.graph = graph_opts(0.1, 3);
  o.norm.scales = {20.0, 40.0};
  o.norm.omega_count = 1;
  o.directions = equispaced_directions(8, 2);
  o.free_box = square(-3, 3);
  o.tol = 0.01;
  const CriticalValues free = shifted_critical_value(constant_potential(0.0), {0.5, -0.5}, o);
  CHECK(std::abs(free.stationary.estimate() - 0.5) <= 0.1);
  const CriticalValues one = shifted_critical_value(constant_potential(1.0), {1.0, 0.0}, o);
  CHECK(std::abs(one.stationary.estimate() - 0.0) <= 0.1);
  const CriticalValues at_zero = shifted_critical_value(constant_potential(1.0), {0.0, 0.0}, o);
  const CriticalValues direct = stationary_critical_value(constant_potential(1.0), o);
  CHECK(at_zero.stationary.lo == direct.stationary.lo);
  CHECK(at_zero.stationary.hi == direct.stationary.hi);
}
