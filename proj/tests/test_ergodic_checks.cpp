#include <cmath>
#include <sstream>

#include "doctest.h"

#include "hjm/ergodic_checks.hpp"
#include "hjm/errors.hpp"
#include "hjm/lax_correctors.hpp"
#include "support.hpp"

using namespace hjm;
using hjm::test::graph_opts;
using hjm::test::product_example;
using hjm::test::segment;
using hjm::test::sine_1d;
using hjm::test::square;

namespace {

AdmissibleCandidate from_function(const Box& box, double h, double (*f)(const Vec&)) {
  AdmissibleCandidate c{Grid(box, h), {}};
  for (int n = 0; n < c.grid.size(); ++n) c.u.push_back(f(c.grid.point(n)));
  return c;
}

}  // namespace

TEST_CASE("Birkhoff averages") {
  const auto env = TorusEnvironment::product_flow(golden_ratio(), 1);
  const OmegaPoint om = env.sample_omega(0);
  const std::vector<double> radii{10.0, 50.0, 200.0};
  const BirkhoffTable one = birkhoff_average(env, [](std::span<const double>) { return 1.0; }, om, radii, 0.1);
  for (double m : one.means) CHECK(m == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(one.counts.back() > one.counts.front());
  const BirkhoffTable cosine = birkhoff_average(
      env, [](std::span<const double> t) { return std::cos(2.0 * kPi * t[0]); }, om, radii, 0.1);
  CHECK(std::abs(cosine.means.back()) <= 0.02);
}

TEST_CASE("density of stationary sets") {
  const Hamiltonian ex = product_example();
  const OmegaPoint om = ex.env().sample_omega(0);
  const TorusFunction v = [&ex](std::span<const double> t) { return ex.potential().on_torus(t); };
  const StationarySet low{ex.env(), v, 0.0, 1.0};
  const DensityTable t = density_asymptotics(low, om, {0.0, 0.25, 0.5, 1.0}, {10.0, 20.0}, 0.1);
  CHECK(t.monotone_in_R);
  for (std::size_t m = 0; m < t.ball_radii.size(); ++m) {
    for (std::size_t k = 1; k < t.big_radii.size(); ++k) CHECK(t.ratio[k][m] >= t.ratio[k - 1][m]);
    CHECK(t.ratio.back()[m] >= 0.99);
  }
  std::ostringstream os;
  t.write_csv(os);
  CHECK(os.str().rfind("R (length),r (length),ratio (fraction)\n", 0) == 0);

  const StationarySet everything{ex.env(), v, 0.0, 1e9};
  const DensityTable all = density_asymptotics(everything, om, {0.0, 1.0}, {5.0}, 0.1);
  for (const auto& row : all.ratio) CHECK(row[0] == 1.0);

  const TorusFunction stripe = [](std::span<const double> th) { return std::cos(2.0 * kPi * th[0]); };
  const StationarySet thin{ex.env(), stripe, 0.999, 2.0};
  const DensityTable th = density_asymptotics(thin, om, {0.0, 0.5, 1.0}, {2.0, 4.0}, 0.005);
  const double fraction = std::acos(0.999) / kPi;
  CHECK(std::abs(th.ratio[0][1] - fraction) <= 0.01);
  CHECK(th.ratio[2][1] >= 0.99);

  const StationarySet empty{ex.env(), v, 100.0, 200.0};
  CHECK_THROWS_AS(density_asymptotics(empty, om, {0.0}, {2.0}, 0.1), EmptySample);
}

TEST_CASE("exact distance transform") {
  const Grid grid(square(0.0, 3.0), 0.25);
  std::vector<char> marked(static_cast<std::size_t>(grid.size()), 0);
  for (int n : {0, 30, 100, 150}) marked[static_cast<std::size_t>(n)] = 1;
  const std::vector<double> d2 = distance_transform(grid, marked);
  for (int n = 0; n < grid.size(); ++n) {
    auto [i, j] = grid.coords(n);
    double best = INFINITY;
    for (int m : {0, 30, 100, 150}) {
      auto [a, b] = grid.coords(m);
      best = std::min(best, static_cast<double>((i - a) * (i - a) + (j - b) * (j - b)));
    }
    CHECK(d2[static_cast<std::size_t>(n)] == best);
  }
}

TEST_CASE("sublinearity verdicts") {
  const std::vector<double> radii{1.0, 2.0, 4.0, 8.0};
  const auto linear = from_function(square(-9, 9), 0.05, [](const Vec& x) { return 0.3 * x[0] - 0.4 * x[1]; });
  const SublinearityReport lr = sublinearity_test(linear, radii);
  CHECK(lr.verdict == Verdict::rejected);
  for (double p : lr.profile) CHECK(p == doctest::Approx(0.5).epsilon(0.02));

  const auto root = from_function(square(-9, 9), 0.05, [](const Vec& x) { return std::sqrt(norm(x)); });
  CHECK(sublinearity_test(root, radii).verdict == Verdict::accepted);

  const Hamiltonian s = sine_1d();
  const MetricGraph g(s, segment(-20.0, 20.0), 0.0, s.env().origin(), graph_opts(0.01, 1));
  const SourceSets sets = detect_sources(g, 0.0, 0.0, {});
  const std::vector<double> zeros(sets.aubry.size(), 0.0);
  const AubryCorrector c = corrector_from_aubry(g, sets, zeros);
  const AdmissibleCandidate periodic{g.grid(), c.u.values()};
  CHECK(sublinearity_test(periodic, std::vector<double>{1.5, 3.5, 7.5, 15.5}).verdict == Verdict::accepted);
  CHECK(to_string(Verdict::inconclusive) == "inconclusive");
}

TEST_CASE("mean increment test") {
  std::vector<AdmissibleCandidate> linear;
  for (int k = 0; k < 8; ++k) {
    linear.push_back(from_function(square(-2, 2), 0.05, [](const Vec& x) { return 0.5 * x[0] + 0.25 * x[1]; }));
  }
  const MeanIncrementReport r = mean_increment_test(linear, {0.0, 0.0}, {0.5, 0.25});
  CHECK(r.mean == doctest::Approx(0.3125).epsilon(1e-9));
  CHECK(r.verdict == Verdict::rejected);
  const MeanIncrementReport same = mean_increment_test(linear, {1.0, 1.0}, {1.0, 1.0});
  CHECK(same.mean == 0.0);
  CHECK(same.verdict == Verdict::accepted);
  CHECK_THROWS(mean_increment_test(std::span<const AdmissibleCandidate>(linear).first(4), {0.0, 0.0}, {1.0, 0.0}));

  const Hamiltonian ex = product_example();
  std::vector<AdmissibleCandidate> correctors;
  for (std::uint64_t k = 0; k < 16; ++k) {
    const MetricGraph g(ex, square(-4, 4), 0.0, ex.env().sample_omega(k), graph_opts(0.05, 2));
    const CorrectorBand band = approximate_corrector(g, 0.25);
    correctors.push_back({g.grid(), band.u.values()});
  }
  const MeanIncrementReport cr = mean_increment_test(correctors, {-1.0, 0.5}, {1.0, -0.5});
  CHECK(cr.samples == 16);
  CHECK(cr.verdict == Verdict::accepted);
}
