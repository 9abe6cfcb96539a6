#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "hjm/asymptotics.hpp"
#include "hjm/effective.hpp"
#include "hjm/hamiltonian.hpp"

namespace hjm {

struct TorusConfig {
  /// product_flow (the two-frequency flow on T^4), periodic (identity flow), or custom.
  std::string kind = "product_flow";
  double lambda = 0.0;  // 0 selects the golden ratio
  int dim = 4;
  int physical_dim = 2;
  std::vector<double> flow_matrix;
  std::uint64_t seed = 1;

  bool operator==(const TorusConfig&) const = default;
};

struct HamiltonianConfig {
  std::string form = "eikonal";
  PotentialSpec potential{PotentialKind::product_quasiperiodic, {}};
  std::vector<std::vector<double>> drift;
  std::vector<double> shift{0.0, 0.0};

  bool operator==(const HamiltonianConfig&) const = default;
};

struct GridConfig {
  std::vector<double> lo{-5.0, -5.0};
  std::vector<double> hi{5.0, 5.0};
  double h = 0.05;
  int stencil_radius = 3;
  std::string quadrature = "midpoint";

  bool operator==(const GridConfig&) const = default;
};

struct EnsembleConfig {
  int omega_count = 8;
  int directions = 16;
  double margin = 2.0;
  double margin_fraction = 0.25;
  bool extrapolate = true;

  bool operator==(const EnsembleConfig&) const = default;
};

struct ToleranceConfig {
  double tol = 0.01;
  std::optional<double> theta;
  double delta = 0.25;
  std::optional<double> epsilon;
  double aubry_constant = 4.0;
  double residual_constant = 10.0;
  double equilibrium_tol = 1e-9;

  bool operator==(const ToleranceConfig&) const = default;
};

struct EffectiveConfig {
  double horizon = 10.0;
  double dt = 0.4;
  double h = 0.1;
  int reach = 6;
  double margin = 1.0;
  double cfl_fraction = 0.01;
  SquareGrid q_grid{2, -1.0, 1.0, 0.25};
  SquareGrid p_grid{2, -0.25, 0.25, 0.25};
  std::vector<double> levels{0.5, 1.0};

  bool operator==(const EffectiveConfig&) const = default;
};

struct DistanceConfig {
  double level = 1.0;
  std::vector<double> from{0.0, 0.0};
  std::vector<double> to{3.0, 4.0};

  bool operator==(const DistanceConfig&) const = default;
};

struct CorrectorConfig {
  /// approximate (E_delta sources at level c), aubry (A_f sources at c_f), or
  /// distance (source at the origin).
  std::string mode = "approximate";
  std::optional<double> level;

  bool operator==(const CorrectorConfig&) const = default;
};

struct ErgodicConfig {
  std::vector<double> birkhoff_radii{25.0, 50.0, 100.0, 200.0};
  double birkhoff_h = 0.1;
  double set_lo = 0.0;
  double set_hi = 1.0;
  std::vector<double> density_big_radii{0.0, 0.5, 1.0, 2.0, 4.0};
  std::vector<double> density_ball_radii{10.0, 20.0, 40.0};
  double density_h = 0.1;
  std::vector<double> sublinearity_radii{1.0, 2.0, 4.0, 8.0};

  bool operator==(const ErgodicConfig&) const = default;
};

struct RunConfig {
  TorusConfig torus;
  HamiltonianConfig hamiltonian;
  GridConfig grid;
  std::vector<double> scales{5.0, 10.0, 20.0};
  EnsembleConfig ensemble;
  ToleranceConfig tolerances;
  EffectiveConfig effective;
  DistanceConfig distance;
  double stable_norm_level = 0.0;
  CorrectorConfig corrector;
  ErgodicConfig ergodic;
  int jobs = 0;
  std::string output = "out";

  bool operator==(const RunConfig&) const = default;
};

nlohmann::json to_json(const RunConfig& config);
/// Missing keys keep their defaults; invalid values throw ConfigError.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

/// Applies "a.b.c=value" to a JSON document; value is parsed as JSON when
/// possible and kept as a string otherwise.
void apply_override(nlohmann::json& doc, const std::string& assignment);

TorusEnvironment build_environment(const RunConfig& config);
Hamiltonian build_hamiltonian(const RunConfig& config);
Box config_box(const RunConfig& config);
GraphOptions graph_options(const RunConfig& config);
StableNormOptions stable_norm_options(const RunConfig& config);

}  // namespace hjm
