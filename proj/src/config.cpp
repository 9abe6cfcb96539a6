#include "hjm/config.hpp"

#include <fstream>

#include "hjm/errors.hpp"

namespace hjm {
namespace {

using nlohmann::json;

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.is_object() || !j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

void read(const json& j, const char* key, std::optional<double>& out) {
  if (!j.is_object() || !j.contains(key)) return;
  if (j.at(key).is_null()) {
    out.reset();
    return;
  }
  double v = 0.0;
  read(j, key, v);
  out = v;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

const json& section(const json& j, const char* key) {
  static const json empty = json::object();
  if (j.is_object() && j.contains(key)) {
    if (!j.at(key).is_object()) throw ConfigError(std::string("config section '") + key + "' must be an object");
    return j.at(key);
  }
  return empty;
}

json square_json(const SquareGrid& g) {
  return {{"dim", g.dim}, {"lo", g.lo}, {"hi", g.hi}, {"step", g.step}};
}

SquareGrid square_from(const json& j, SquareGrid g) {
  read(j, "dim", g.dim);
  read(j, "lo", g.lo);
  read(j, "hi", g.hi);
  read(j, "step", g.step);
  if (!(g.step > 0.0) || !(g.hi > g.lo)) throw ConfigError("square grid needs step > 0 and lo < hi");
  return g;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

void require_positive(const std::vector<double>& v, const std::string& what) {
  require(!v.empty(), what + " must be nonempty");
  for (double x : v) require(x > 0.0, what + " entries must be positive");
}

}  // namespace

json to_json(const RunConfig& c) {
  json j;
  j["torus"] = {{"kind", c.torus.kind},         {"lambda", c.torus.lambda},
                {"dim", c.torus.dim},           {"physical_dim", c.torus.physical_dim},
                {"flow_matrix", c.torus.flow_matrix}, {"seed", c.torus.seed}};
  j["hamiltonian"] = {{"form", c.hamiltonian.form},
                      {"potential", {{"kind", to_string(c.hamiltonian.potential.kind)},
                                     {"coeffs", c.hamiltonian.potential.coeffs}}},
                      {"drift", c.hamiltonian.drift},
                      {"shift", c.hamiltonian.shift}};
  j["grid"] = {{"box", {{"lo", c.grid.lo}, {"hi", c.grid.hi}}},
               {"h", c.grid.h},
               {"stencil_radius", c.grid.stencil_radius},
               {"quadrature", c.grid.quadrature}};
  j["scales"] = c.scales;
  j["ensemble"] = {{"omega_count", c.ensemble.omega_count},
                   {"directions", c.ensemble.directions},
                   {"margin", c.ensemble.margin},
                   {"margin_fraction", c.ensemble.margin_fraction},
                   {"extrapolate", c.ensemble.extrapolate}};
  j["tolerances"] = {{"tol", c.tolerances.tol},
                     {"theta", optional_json(c.tolerances.theta)},
                     {"delta", c.tolerances.delta},
                     {"epsilon", optional_json(c.tolerances.epsilon)},
                     {"aubry_constant", c.tolerances.aubry_constant},
                     {"residual_constant", c.tolerances.residual_constant},
                     {"equilibrium_tol", c.tolerances.equilibrium_tol}};
  j["effective"] = {{"T", c.effective.horizon},
                    {"dt", c.effective.dt},
                    {"h", c.effective.h},
                    {"reach", c.effective.reach},
                    {"margin", c.effective.margin},
                    {"cfl_fraction", c.effective.cfl_fraction},
                    {"q_grid", square_json(c.effective.q_grid)},
                    {"p_grid", square_json(c.effective.p_grid)},
                    {"levels", c.effective.levels}};
  j["distance"] = {{"a", c.distance.level}, {"from", c.distance.from}, {"to", c.distance.to}};
  j["stable_norm"] = {{"a", c.stable_norm_level}};
  j["corrector"] = {{"mode", c.corrector.mode}, {"a", optional_json(c.corrector.level)}};
  j["ergodic"] = {{"birkhoff_radii", c.ergodic.birkhoff_radii},
                  {"birkhoff_h", c.ergodic.birkhoff_h},
                  {"set_lo", c.ergodic.set_lo},
                  {"set_hi", c.ergodic.set_hi},
                  {"density_R", c.ergodic.density_big_radii},
                  {"density_r", c.ergodic.density_ball_radii},
                  {"density_h", c.ergodic.density_h},
                  {"sublinearity_radii", c.ergodic.sublinearity_radii}};
  j["jobs"] = c.jobs;
  j["output"] = c.output;
  return j;
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig c;
  const json& t = section(j, "torus");
  read(t, "kind", c.torus.kind);
  read(t, "lambda", c.torus.lambda);
  read(t, "dim", c.torus.dim);
  read(t, "physical_dim", c.torus.physical_dim);
  read(t, "flow_matrix", c.torus.flow_matrix);
  read(t, "seed", c.torus.seed);
  require(c.torus.kind == "product_flow" || c.torus.kind == "periodic" || c.torus.kind == "custom",
          "torus.kind must be product_flow, periodic or custom");

  const json& hs = section(j, "hamiltonian");
  read(hs, "form", c.hamiltonian.form);
  hamiltonian_form_from_string(c.hamiltonian.form);
  const json& pot = section(hs, "potential");
  std::string kind = to_string(c.hamiltonian.potential.kind);
  read(pot, "kind", kind);
  c.hamiltonian.potential.kind = potential_kind_from_string(kind);
  read(pot, "coeffs", c.hamiltonian.potential.coeffs);
  read(hs, "drift", c.hamiltonian.drift);
  read(hs, "shift", c.hamiltonian.shift);

  const json& g = section(j, "grid");
  const json& box = section(g, "box");
  read(box, "lo", c.grid.lo);
  read(box, "hi", c.grid.hi);
  read(g, "h", c.grid.h);
  read(g, "stencil_radius", c.grid.stencil_radius);
  read(g, "quadrature", c.grid.quadrature);
  require(c.grid.h > 0.0, "grid.h must be positive");
  require(c.grid.stencil_radius >= 1, "grid.stencil_radius must be at least 1");
  require(c.grid.lo.size() == c.grid.hi.size() && !c.grid.lo.empty() && c.grid.lo.size() <= 2,
          "grid.box lo and hi must have 1 or 2 matching components");
  for (std::size_t a = 0; a < c.grid.lo.size(); ++a) require(c.grid.lo[a] < c.grid.hi[a], "grid.box needs lo < hi");
  quadrature_from_string(c.grid.quadrature);

  read(j, "scales", c.scales);
  require_positive(c.scales, "scales");

  const json& e = section(j, "ensemble");
  read(e, "omega_count", c.ensemble.omega_count);
  read(e, "directions", c.ensemble.directions);
  read(e, "margin", c.ensemble.margin);
  read(e, "margin_fraction", c.ensemble.margin_fraction);
  read(e, "extrapolate", c.ensemble.extrapolate);
  require(c.ensemble.omega_count >= 1, "ensemble.omega_count must be positive");
  require(c.ensemble.directions >= 1, "ensemble.directions must be positive");
  require(c.ensemble.margin >= 0.0 && c.ensemble.margin_fraction >= 0.0, "ensemble margins must be nonnegative");

  const json& tl = section(j, "tolerances");
  read(tl, "tol", c.tolerances.tol);
  read(tl, "theta", c.tolerances.theta);
  read(tl, "delta", c.tolerances.delta);
  read(tl, "epsilon", c.tolerances.epsilon);
  read(tl, "aubry_constant", c.tolerances.aubry_constant);
  read(tl, "residual_constant", c.tolerances.residual_constant);
  read(tl, "equilibrium_tol", c.tolerances.equilibrium_tol);
  require(c.tolerances.tol > 0.0, "tolerances.tol must be positive");
  require(c.tolerances.delta > 0.0, "tolerances.delta must be positive");
  require(!c.tolerances.theta || *c.tolerances.theta >= 0.0, "tolerances.theta must be nonnegative");
  require(!c.tolerances.epsilon || *c.tolerances.epsilon >= 0.0, "tolerances.epsilon must be nonnegative");
  require(c.tolerances.aubry_constant > 0.0, "tolerances.aubry_constant must be positive");
  require(c.tolerances.residual_constant > 0.0, "tolerances.residual_constant must be positive");
  require(c.tolerances.equilibrium_tol >= 0.0, "tolerances.equilibrium_tol must be nonnegative");

  const json& ef = section(j, "effective");
  read(ef, "T", c.effective.horizon);
  read(ef, "dt", c.effective.dt);
  read(ef, "h", c.effective.h);
  read(ef, "reach", c.effective.reach);
  read(ef, "margin", c.effective.margin);
  read(ef, "cfl_fraction", c.effective.cfl_fraction);
  c.effective.q_grid = square_from(section(ef, "q_grid"), c.effective.q_grid);
  c.effective.p_grid = square_from(section(ef, "p_grid"), c.effective.p_grid);
  read(ef, "levels", c.effective.levels);
  require(c.effective.horizon > 0.0 && c.effective.dt > 0.0 && c.effective.h > 0.0,
          "effective.T, dt and h must be positive");
  require(c.effective.reach >= 1, "effective.reach must be at least 1");
  require(c.effective.cfl_fraction >= 0.0, "effective.cfl_fraction must be nonnegative");

  const json& d = section(j, "distance");
  read(d, "a", c.distance.level);
  read(d, "from", c.distance.from);
  read(d, "to", c.distance.to);
  read(section(j, "stable_norm"), "a", c.stable_norm_level);

  const json& co = section(j, "corrector");
  read(co, "mode", c.corrector.mode);
  read(co, "a", c.corrector.level);
  require(c.corrector.mode == "approximate" || c.corrector.mode == "aubry" || c.corrector.mode == "distance",
          "corrector.mode must be approximate, aubry or distance");

  const json& er = section(j, "ergodic");
  read(er, "birkhoff_radii", c.ergodic.birkhoff_radii);
  read(er, "birkhoff_h", c.ergodic.birkhoff_h);
  read(er, "set_lo", c.ergodic.set_lo);
  read(er, "set_hi", c.ergodic.set_hi);
  read(er, "density_R", c.ergodic.density_big_radii);
  read(er, "density_r", c.ergodic.density_ball_radii);
  read(er, "density_h", c.ergodic.density_h);
  read(er, "sublinearity_radii", c.ergodic.sublinearity_radii);
  require_positive(c.ergodic.birkhoff_radii, "ergodic.birkhoff_radii");
  require_positive(c.ergodic.density_ball_radii, "ergodic.density_r");
  require_positive(c.ergodic.sublinearity_radii, "ergodic.sublinearity_radii");
  require(c.ergodic.birkhoff_h > 0.0 && c.ergodic.density_h > 0.0, "ergodic lattice spacings must be positive");
  require(c.ergodic.set_lo <= c.ergodic.set_hi, "ergodic.set_lo must not exceed set_hi");

  read(j, "jobs", c.jobs);
  read(j, "output", c.output);
  require(c.jobs >= 0, "jobs must be nonnegative");
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like key.path=value: " + assignment);
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ConfigError("empty key in override " + assignment);
    if (!node->is_object()) *node = json::object();
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

TorusEnvironment build_environment(const RunConfig& c) {
  if (c.torus.kind == "product_flow") {
    return TorusEnvironment::product_flow(c.torus.lambda == 0.0 ? golden_ratio() : c.torus.lambda, c.torus.seed);
  }
  if (c.torus.kind == "periodic") return TorusEnvironment::periodic(c.torus.physical_dim, c.torus.seed);
  return TorusEnvironment(c.torus.dim, c.torus.physical_dim, c.torus.flow_matrix, c.torus.seed);
}

Hamiltonian build_hamiltonian(const RunConfig& c) {
  HamiltonianSpec spec{build_environment(c), hamiltonian_form_from_string(c.hamiltonian.form), c.hamiltonian.potential,
                       c.hamiltonian.drift, {0.0, 0.0}};
  if (c.hamiltonian.shift.size() > 2) throw ConfigError("hamiltonian.shift has too many components");
  for (std::size_t a = 0; a < c.hamiltonian.shift.size(); ++a) spec.shift[a] = c.hamiltonian.shift[a];
  if (static_cast<int>(c.grid.lo.size()) != spec.env.physical_dim()) {
    throw ConfigError("grid.box dimension differs from the physical dimension");
  }
  return Hamiltonian(std::move(spec));
}

Box config_box(const RunConfig& c) {
  Box b;
  b.dim = static_cast<int>(c.grid.lo.size());
  for (std::size_t a = 0; a < c.grid.lo.size(); ++a) {
    b.lo[a] = c.grid.lo[a];
    b.hi[a] = c.grid.hi[a];
  }
  return b;
}

GraphOptions graph_options(const RunConfig& c) {
  GraphOptions o;
  o.h = c.grid.h;
  o.stencil_radius = c.grid.stencil_radius;
  o.quadrature = quadrature_from_string(c.grid.quadrature);
  o.jobs = c.jobs;
  return o;
}

StableNormOptions stable_norm_options(const RunConfig& c) {
  StableNormOptions o;
  o.scales = c.scales;
  o.omega_count = c.ensemble.omega_count;
  o.graph = graph_options(c);
  o.margin = c.ensemble.margin;
  o.margin_fraction = c.ensemble.margin_fraction;
  o.extrapolate = c.ensemble.extrapolate;
  o.jobs = c.jobs;
  return o;
}

}  // namespace hjm
