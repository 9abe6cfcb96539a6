#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hjm/asymptotics.hpp"
#include "hjm/config.hpp"
#include "hjm/effective.hpp"
#include "hjm/ergodic_checks.hpp"
#include "hjm/errors.hpp"
#include "hjm/lax_correctors.hpp"
#include "hjm/metric_graph.hpp"
#include "hjm/parallel.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hjm;

namespace {

/// Defaults of the example61 command; a config file and --set overrides apply on top.
constexpr const char* kExample61Defaults = R"({
  "torus": {"kind": "product_flow", "dim": 4, "physical_dim": 2, "lambda": 0},
  "hamiltonian": {"form": "eikonal", "potential": {"kind": "product_quasiperiodic"}},
  "grid": {"box": {"lo": [-10, -10], "hi": [10, 10]}, "h": 0.1, "stencil_radius": 3},
  "scales": [20, 100, 200],
  "ensemble": {"omega_count": 8, "margin_fraction": 0.25},
  "tolerances": {"delta": 0.25}
})";

struct Context {
  RunConfig config;
  fs::path out;
};

json bracket_json(const CriticalBracket& b) {
  return {{"lo", b.lo}, {"hi", b.hi}, {"width", b.width()}, {"estimate", b.estimate()}, {"iterations", b.iterations}};
}

json vec_json(const Vec& v, int dim) { return dim > 1 ? json{v[0], v[1]} : json{v[0]}; }

Vec to_vec(const std::vector<double>& v) {
  Vec out{0.0, 0.0};
  for (std::size_t a = 0; a < v.size() && a < 2; ++a) out[a] = v[a];
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path.string());
  os << text;
}

void write_summary(const Context& ctx, json summary) {
  summary["config"] = to_json(ctx.config);
  write_text(ctx.out / "summary.json", summary.dump(2) + "\n");
}

void write_grid_csv(const fs::path& path, const Grid& grid, const std::vector<double>& values,
                    const std::string& column) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path.string());
  os.precision(12);
  os << "x (length),y (length)," << column << "\n";
  for (int node = 0; node < grid.size(); ++node) {
    const Vec p = grid.point(node);
    os << p[0] << ',' << p[1] << ',' << values[static_cast<std::size_t>(node)] << '\n';
  }
}

std::vector<Vec> config_directions(const RunConfig& c, int dim) { return equispaced_directions(c.ensemble.directions, dim); }

CriticalBracket free_bracket(const Hamiltonian& h, const RunConfig& c) {
  return free_critical_value(h, h.env().sample_omega(0), config_box(c), graph_options(c), c.tolerances.tol);
}

int cmd_distance(const Context& ctx) {
  const RunConfig& c = ctx.config;
  const Hamiltonian h = build_hamiltonian(c);
  const OmegaPoint omega = h.env().sample_omega(0);
  const MetricGraph graph(h, config_box(c), c.distance.level, omega, graph_options(c));
  const int from = graph.grid().nearest(to_vec(c.distance.from));
  const int to = graph.grid().nearest(to_vec(c.distance.to));
  if (from < 0 || to < 0) throw ConfigError("distance endpoints must lie in grid.box");
  const DistanceField field = shortest_distances(graph, from);
  const bool boundary = field.path_touches_boundary(to);
  if (boundary) std::cerr << "warning: the shortest path touches the box boundary; the value may be truncated\n";

  write_grid_csv(ctx.out / "distance.csv", graph.grid(), field.values(), "distance (action)");
  field.write_binary((ctx.out / "distance.bin").string(), c.torus.seed);
  {
    std::ofstream dat(ctx.out / "distance_profile.dat");
    dat << "# x (length)  d(from, (x, from_y)) (action)\n";
    const Vec p0 = graph.grid().point(from);
    for (int node = 0; node < graph.grid().size(); ++node) {
      const Vec p = graph.grid().point(node);
      if (p[1] == p0[1]) dat << p[0] << ' ' << field.value(node) << '\n';
    }
  }
  const int dim = h.dim();
  write_summary(ctx, {{"command", "distance"},
                      {"a", c.distance.level},
                      {"from", vec_json(graph.grid().point(from), dim)},
                      {"to", vec_json(graph.grid().point(to), dim)},
                      {"value", field.value(to)},
                      {"nodes", graph.node_count()},
                      {"reached_all", field.reached_all},
                      {"path_touches_boundary", boundary}});
  std::cout << "d = " << field.value(to) << "\n";
  return 0;
}

json stable_norm_json(const StableNormEstimate& est, int dim) {
  json dirs = json::array();
  for (const auto& d : est.directions) {
    dirs.push_back({{"q", vec_json(d.direction, dim)},
                    {"angle", std::atan2(d.direction[1], d.direction[0])},
                    {"phi", d.phi},
                    {"spread", d.spread},
                    {"mean_by_scale", d.mean},
                    {"path_touches_boundary", d.touched_boundary}});
  }
  return {{"a", est.level}, {"kappa", est.kappa}, {"delta_hat", est.delta_hat}, {"scales", est.scales},
          {"directions", dirs}};
}

void write_polar_dat(const fs::path& path, const StableNormEstimate& est) {
  std::ofstream dat(path);
  dat << "# angle (rad)  phi_hat (action/length)  spread\n";
  for (const auto& d : est.directions) {
    dat << std::atan2(d.direction[1], d.direction[0]) << ' ' << d.phi << ' ' << d.spread << '\n';
  }
}

int cmd_stable_norm(const Context& ctx) {
  const RunConfig& c = ctx.config;
  const Hamiltonian h = build_hamiltonian(c);
  const StableNormOptions opts = stable_norm_options(c);
  const StableNormEstimate est = stable_norm(h, c.stable_norm_level, config_directions(c, h.dim()), opts);
  const double t_max = *std::max_element(c.scales.begin(), c.scales.end());
  const double theta = c.tolerances.theta.value_or(5.0 * est.kappa * c.grid.h / t_max);
  json degenerate = json::array();
  for (const auto& d : est.directions) {
    if (d.phi < theta) degenerate.push_back(vec_json(d.direction, h.dim()));
  }
  {
    std::ofstream os(ctx.out / "stable_norm.csv");
    est.write_csv(os);
  }
  write_polar_dat(ctx.out / "stable_norm.dat", est);
  json s = stable_norm_json(est, h.dim());
  s["command"] = "stable-norm";
  s["theta"] = theta;
  s["degenerate_directions"] = degenerate;
  write_summary(ctx, s);
  std::cout << "delta_hat = " << est.delta_hat << " (theta " << theta << ")\n";
  return 0;
}

CriticalOptions critical_options(const RunConfig& c, int dim) {
  CriticalOptions o;
  o.norm = stable_norm_options(c);
  o.directions = config_directions(c, dim);
  o.free_box = config_box(c);
  o.tol = c.tolerances.tol;
  o.theta = c.tolerances.theta;
  return o;
}

json critical_json(const CriticalValues& cv, int dim) {
  json degenerate = json::array();
  for (const Vec& q : cv.degenerate_directions) degenerate.push_back(vec_json(q, dim));
  return {{"c_f", bracket_json(cv.free)},
          {"c", bracket_json(cv.stationary)},
          {"theta", cv.theta},
          {"stable_norm_evaluations", cv.nondegeneracy_evaluations},
          {"degenerate_directions", degenerate},
          {"phi_nonnegative_at_c", cv.nonnegative_at_critical},
          {"stable_norm_at_c", stable_norm_json(cv.at_critical, dim)}};
}

int cmd_critical(const Context& ctx) {
  const RunConfig& c = ctx.config;
  const Hamiltonian h = build_hamiltonian(c);
  const CriticalValues cv = stationary_critical_value(h, critical_options(c, h.dim()));
  json s = critical_json(cv, h.dim());
  s["command"] = "critical";
  write_summary(ctx, s);
  std::cout << "c_f in [" << cv.free.lo << ", " << cv.free.hi << "], c in [" << cv.stationary.lo << ", "
            << cv.stationary.hi << "]\n";
  return 0;
}

EffectiveOptions effective_options(const RunConfig& c) {
  EffectiveOptions o;
  o.action.h = c.effective.h;
  o.action.dt = c.effective.dt;
  o.action.reach = c.effective.reach;
  o.action.margin = c.effective.margin;
  o.action.cfl_fraction = c.effective.cfl_fraction;
  o.action.jobs = c.jobs;
  o.omega_count = c.ensemble.omega_count;
  o.extrapolate = c.ensemble.extrapolate;
  return o;
}

int cmd_effective(const Context& ctx) {
  const RunConfig& c = ctx.config;
  const Hamiltonian h = build_hamiltonian(c);
  const int dim = h.dim();
  SquareGrid qg = c.effective.q_grid;
  SquareGrid pg = c.effective.p_grid;
  qg.dim = pg.dim = dim;
  const LagrangianBar lbar = effective_lagrangian(h, qg, c.effective.horizon, effective_options(c));
  const HamiltonianBar hbar = effective_hamiltonian(lbar, pg);
  const CriticalBracket cf = free_bracket(h, c);
  {
    std::ofstream os(ctx.out / "lbar.csv");
    lbar.write_csv(os);
  }
  {
    std::ofstream os(ctx.out / "hbar.csv");
    hbar.write_csv(os);
  }
  double lbar0 = NAN;
  for (std::size_t k = 0; k < lbar.q.size(); ++k) {
    if (norm(lbar.q[k]) < 1e-12) lbar0 = lbar.value[k];
  }
  json sig = json::array();
  for (double a : c.effective.levels) {
    for (const Vec& q : config_directions(c, dim)) {
      try {
        sig.push_back({{"a", a}, {"q", vec_json(q, dim)}, {"sigma_bar", sigma_bar(hbar, a, q)}});
      } catch (const EmptyEffectiveSublevel&) {
        sig.push_back({{"a", a}, {"q", vec_json(q, dim)}, {"sigma_bar", nullptr}});
      }
    }
  }
  json s{{"command", "effective"},
         {"horizon", lbar.horizon},
         {"min_Hbar", hbar.min_value()},
         {"argmin_Hbar", vec_json(hbar.argmin(), dim)},
         {"c_f", bracket_json(cf)},
         {"min_Hbar_minus_c_f", hbar.min_value() - cf.estimate()},
         {"Lbar_at_0", std::isnan(lbar0) ? json(nullptr) : json(lbar0)},
         {"fenchel_residual", std::isnan(lbar0) ? json(nullptr) : json(-lbar0 - hbar.min_value())},
         {"sigma_bar", sig}};
  write_summary(ctx, s);
  std::cout << "min Hbar = " << hbar.min_value() << ", c_f = " << cf.estimate() << "\n";
  return 0;
}

json band_json(const CorrectorBand& b) {
  return {{"subsolution", b.upper_ok},
          {"solution_off_C", b.defect_off_sources == 0.0},
          {"band", {b.lo, b.hi}},
          {"observed_max", b.observed_max},
          {"observed_min_on_C", b.observed_min_on_sources},
          {"defect_off_C", b.defect_off_sources},
          {"sources", b.sources.size()},
          {"passed", b.passed}};
}

int cmd_corrector(const Context& ctx) {
  const RunConfig& c = ctx.config;
  const Hamiltonian h = build_hamiltonian(c);
  const OmegaPoint omega = h.env().sample_omega(0);
  const CriticalBracket cf = free_bracket(h, c);
  const double level = c.corrector.level.value_or(cf.estimate());
  const MetricGraph graph(h, config_box(c), level, omega, graph_options(c));
  json s{{"command", "corrector"}, {"mode", c.corrector.mode}, {"a", level}, {"c_f", bracket_json(cf)}};
  std::vector<double> u;
  std::vector<double> residual;
  if (c.corrector.mode == "approximate") {
    const CorrectorBand band = approximate_corrector(graph, c.tolerances.delta, c.tolerances.residual_constant);
    u = band.u.values();
    residual = band.residual;
    s["verdict"] = band_json(band);
  } else if (c.corrector.mode == "aubry") {
    SourceOptions so;
    so.delta = c.tolerances.delta;
    so.epsilon = c.tolerances.epsilon;
    so.aubry_constant = c.tolerances.aubry_constant;
    so.equilibrium_tol = c.tolerances.equilibrium_tol;
    const SourceSets sets = detect_sources(graph, level, level, so);
    const std::vector<double> zeros(sets.aubry.size(), 0.0);
    const AubryCorrector ac = corrector_from_aubry(graph, sets, zeros);
    u = ac.u.values();
    const ResidualReport sub =
        subsolution_residual(graph, u, c.tolerances.residual_constant);
    residual = sub.per_node;
    s["verdict"] = {{"subsolution", sub.subsolution},
                    {"solution_off_C", ac.solution},
                    {"fixed_point_defect", ac.defect.max_defect},
                    {"aubry_nodes", sets.aubry.size()},
                    {"equilibria", sets.equilibria.size()},
                    {"epsilon", sets.epsilon},
                    {"residual_constant", sub.constant}};
  } else {
    const int origin = graph.grid().nearest({0.0, 0.0});
    if (origin < 0) throw ConfigError("grid.box must contain the origin for corrector.mode = distance");
    const int src[] = {origin};
    const double g[] = {0.0};
    const DistanceField field = lax_solve(graph, src, g);
    u = field.values();
    const ResidualReport sub =
        subsolution_residual(graph, u, c.tolerances.residual_constant);
    residual = sub.per_node;
    const DefectReport def = solution_residual(graph, field.ticks, src);
    s["verdict"] = {{"subsolution", sub.subsolution},
                    {"solution_off_C", def.max_defect == 0.0},
                    {"max_residual", sub.max_residual},
                    {"residual_constant", sub.constant}};
  }
  write_grid_csv(ctx.out / "u.csv", graph.grid(), u, "u (action)");
  write_grid_csv(ctx.out / "residual.csv", graph.grid(), residual, "H(x,Du)-a (action/time)");
  write_summary(ctx, s);
  std::cout << s["verdict"].dump() << "\n";
  return 0;
}

int cmd_ergodic(const Context& ctx) {
  const RunConfig& c = ctx.config;
  const Hamiltonian h = build_hamiltonian(c);
  const OmegaPoint omega = h.env().sample_omega(0);
  const Potential& pot = h.potential();
  const TorusFunction f = [&pot](std::span<const double> th) { return pot.on_torus(th); };
  const BirkhoffTable bt = birkhoff_average(h.env(), f, omega, c.ergodic.birkhoff_radii, c.ergodic.birkhoff_h, c.jobs);
  {
    std::ofstream os(ctx.out / "birkhoff.csv");
    os << "r (length),mean V (potential),points (count)\n";
    for (std::size_t k = 0; k < bt.radii.size(); ++k) {
      os << bt.radii[k] << ',' << bt.means[k] << ',' << bt.counts[k] << '\n';
    }
  }
  const auto torus_mean = pot.torus_mean();
  json s{{"command", "ergodic-check"},
         {"birkhoff", {{"radii", bt.radii}, {"means", bt.means},
                       {"torus_mean", torus_mean ? json(*torus_mean) : json(nullptr)},
                       {"tail_relative_error", torus_mean && *torus_mean != 0.0
                                                   ? json(std::abs(bt.means.back() - *torus_mean) / *torus_mean)
                                                   : json(nullptr)}}}};

  const StationarySet set{h.env(), f, c.ergodic.set_lo, c.ergodic.set_hi};
  try {
    const DensityTable dt = density_asymptotics(set, omega, c.ergodic.density_big_radii,
                                                c.ergodic.density_ball_radii, c.ergodic.density_h, c.jobs);
    std::ofstream os(ctx.out / "density.csv");
    dt.write_csv(os);
    json least = json::array();
    for (std::size_t e = 0; e < dt.epsilons.size(); ++e) {
      least.push_back({{"epsilon", dt.epsilons[e]},
                       {"R", dt.least_radius[e] ? json(*dt.least_radius[e]) : json(nullptr)}});
    }
    s["density"] = {{"R", dt.big_radii}, {"r", dt.ball_radii}, {"ratio", dt.ratio},
                    {"monotone_in_R", dt.monotone_in_R}, {"least_R", least}};
  } catch (const EmptySample& e) {
    s["density"] = {{"error", e.what()}};
  }

  const CriticalBracket cf = free_bracket(h, c);
  const MetricGraph graph(h, config_box(c), cf.estimate(), omega, graph_options(c));
  try {
    const CorrectorBand band = approximate_corrector(graph, c.tolerances.delta, c.tolerances.residual_constant);
    const AdmissibleCandidate cand{graph.grid(), band.u.values()};
    const SublinearityReport sr = sublinearity_test(cand, c.ergodic.sublinearity_radii);
    s["sublinearity"] = {{"candidate", "approximate corrector at c_f"},
                         {"radii", sr.radii},
                         {"profile", sr.profile},
                         {"slope_vs_inverse_r", sr.slope},
                         {"verdict", to_string(sr.verdict)}};
  } catch (const Error& e) {
    s["sublinearity"] = {{"error", e.what()}};
  }
  write_summary(ctx, s);
  std::cout << "Birkhoff tail mean = " << bt.means.back() << "\n";
  return 0;
}

int cmd_example61(const Context& ctx) {
  RunConfig c = ctx.config;
  const Hamiltonian h = build_hamiltonian(c);
  const int dim = h.dim();
  if (dim != 2 || h.potential().spec().kind != PotentialKind::product_quasiperiodic) {
    throw ConfigError("example61 needs the product_quasiperiodic potential in two dimensions");
  }
  const OmegaPoint omega0 = h.env().sample_omega(0);
  const CriticalBracket cf = free_bracket(h, c);

  StableNormOptions axes = stable_norm_options(c);
  const StableNormEstimate axis_est = stable_norm(h, 0.0, {{1.0, 0.0}, {0.0, 1.0}}, axes);
  StableNormOptions diag = axes;
  for (double& t : diag.scales) t *= 0.25;
  const double r2 = std::sqrt(0.5);
  const StableNormEstimate diag_est = stable_norm(h, 0.0, {{r2, r2}, {r2, -r2}}, diag);
  {
    std::ofstream os(ctx.out / "stable_norm_axes.csv");
    axis_est.write_csv(os);
    std::ofstream od(ctx.out / "stable_norm_diagonals.csv");
    diag_est.write_csv(od);
  }

  CriticalOptions co = critical_options(c, dim);
  co.norm.scales = {5.0, 10.0, 20.0};
  co.norm.omega_count = std::min(4, co.norm.omega_count);
  co.directions = equispaced_directions(4, dim);
  co.free_box = Box{2, {-5.0, -5.0}, {5.0, 5.0}};
  co.tol = std::max(0.05, c.tolerances.tol);
  const CriticalValues cv = stationary_critical_value(h, co);

  const MetricGraph graph(h, config_box(c), 0.0, omega0, graph_options(c));
  json band;
  try {
    const CorrectorBand b = approximate_corrector(graph, c.tolerances.delta, c.tolerances.residual_constant);
    band = band_json(b);
    write_grid_csv(ctx.out / "approximate_corrector.csv", graph.grid(), b.u.values(), "u (action)");
  } catch (const EmptySource& e) {
    band = {{"error", e.what()}};
  }

  const double t_max = *std::max_element(axes.scales.begin(), axes.scales.end());
  json s{{"command", "example61"},
         {"lambda", c.torus.lambda == 0.0 ? golden_ratio() : c.torus.lambda},
         {"c_f", bracket_json(cf)},
         {"c_coarse", bracket_json(cv.stationary)},
         {"c_coarse_settings", {{"scales", co.norm.scales}, {"omega_count", co.norm.omega_count},
                                  {"directions", 4}, {"tol", co.tol}, {"theta", cv.theta}}},
         {"stable_norm_axes", stable_norm_json(axis_est, dim)},
         {"stable_norm_diagonals", stable_norm_json(diag_est, dim)},
         {"phi0_e1_at_Tmax", axis_est.directions[0].mean.back()},
         {"phi0_e2_at_Tmax", axis_est.directions[1].mean.back()},
         {"T_max", t_max},
         {"approximate_corrector", band},
         {"notes",
          {"The null function is a strict admissible subsolution at level 0 away from the zeros of V, "
           "so the stationary critical value is c = 0.",
           "V vanishes exactly only on a null set, so c = c_f = 0 and phi_0 is degenerate in every direction."}}};
  write_summary(ctx, s);
  std::cout << "phi0(e1) at T=" << t_max << ": " << axis_est.directions[0].mean.back()
            << ", phi0(e2): " << axis_est.directions[1].mean.back() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Metric and homogenization tools for stationary ergodic Hamilton-Jacobi equations"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  int jobs = 0;
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--out", out_dir, "output directory (overrides the config)");
  app.add_option("--seed", seed, "torus sampling seed (overrides torus.seed)");
  app.add_option("--jobs", jobs, "worker threads (0 = hardware)");
  app.add_option("--set", overrides, "config override key.path=value")->take_all();

  struct Command {
    const char* name;
    const char* help;
    int (*run)(const Context&);
  };
  const Command commands[] = {
      {"distance", "graph distance between two points", cmd_distance},
      {"stable-norm", "stable norm estimates over an omega ensemble", cmd_stable_norm},
      {"critical", "free and stationary critical values", cmd_critical},
      {"effective", "effective Lagrangian, Hamiltonian and sigma_bar", cmd_effective},
      {"corrector", "Lax solutions, residuals and corrector checks", cmd_corrector},
      {"ergodic-check", "Birkhoff, density and sublinearity checks", cmd_ergodic},
      {"example61", "full report for the quasi-periodic product example", cmd_example61},
  };
  for (const auto& cmd : commands) app.add_subcommand(cmd.name, cmd.help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 3;
  }

  try {
    json doc = app.got_subcommand("example61") ? json::parse(kExample61Defaults) : json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("cannot open config file " + config_path);
      const json file = json::parse(in, nullptr, false);
      if (file.is_discarded()) throw ConfigError("config file is not valid JSON: " + config_path);
      doc.merge_patch(file);
    }
    for (const auto& o : overrides) apply_override(doc, o);
    if (app.count("--seed") > 0) apply_override(doc, "torus.seed=" + std::to_string(seed));
    if (app.count("--jobs") > 0) apply_override(doc, "jobs=" + std::to_string(jobs));
    if (!out_dir.empty()) doc["output"] = out_dir;

    Context ctx{config_from_json(doc), {}};
    if (ctx.config.jobs > 0) set_default_jobs(ctx.config.jobs);
    ctx.out = ctx.config.output;
    fs::create_directories(ctx.out);
    for (const auto& cmd : commands) {
      if (app.got_subcommand(cmd.name)) {
        try {
          return cmd.run(ctx);
        } catch (const NegativeCycle& e) {
          write_summary(ctx, {{"command", cmd.name}, {"error", "NegativeCycle"}, {"level", e.level()},
                              {"message", e.what()}});
          std::cerr << "error: " << e.what() << " (the level is below c_f at this discretization)\n";
          return 2;
        } catch (const EmptySublevel& e) {
          write_summary(ctx, {{"command", cmd.name}, {"error", "EmptySublevel"}, {"level", e.level()},
                              {"pointwise_min", e.pointwise_min()}, {"message", e.what()}});
          std::cerr << "error: " << e.what() << " (the level is below c_f)\n";
          return 2;
        }
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
