#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hjm/environment.hpp"
#include "hjm/geometry.hpp"

namespace hjm {

/// Finite Fourier sum on the torus:
///   f(theta) = c0 + sum_j [ a_j cos(2 pi <k_j, theta>) + b_j sin(2 pi <k_j, theta>) ].
/// Flat coefficient layout: [c0, k_1..k_d, a, b, k_1..k_d, a, b, ...].
class TrigField {
 public:
  struct Term {
    std::vector<int> k;
    double cos_coef = 0.0;
    double sin_coef = 0.0;
  };

  TrigField() = default;
  TrigField(double constant, std::vector<Term> terms) : constant_(constant), terms_(std::move(terms)) {}

  static TrigField from_flat(std::span<const double> coeffs, int torus_dim);
  std::vector<double> to_flat() const;

  double eval(std::span<const double> theta) const;
  double l1_bound() const;
  double constant() const { return constant_; }
  const std::vector<Term>& terms() const { return terms_; }

 private:
  double constant_ = 0.0;
  std::vector<Term> terms_;
};

enum class PotentialKind { product_quasiperiodic, single_cosine_1d, constant, user_trigonometric };

std::string to_string(PotentialKind kind);
PotentialKind potential_kind_from_string(const std::string& name);

/// Closed-form stationary potentials V(x, omega) = f(tau_x omega) >= 0.
///  - product_quasiperiodic: prod over coordinate pairs of 2 - cos(2 pi t1) - cos(2 pi t2);
///    coeffs unused, torus dimension must be even.
///  - single_cosine_1d: coeffs [amplitude, coordinate]; V = |amplitude| sin(pi t) with t the
///    chosen phase in [0,1), so V^2 = amplitude^2 (1 - cos(2 pi t)) / 2.
///  - constant: coeffs [v]; V = |v|.
///  - user_trigonometric: coeffs in TrigField flat layout; V = |f|.
struct PotentialSpec {
  PotentialKind kind = PotentialKind::constant;
  std::vector<double> coeffs;

  bool operator==(const PotentialSpec&) const = default;
};

class Potential {
 public:
  Potential(const PotentialSpec& spec, int torus_dim);

  double on_torus(std::span<const double> theta) const;
  /// l1 bound from the coefficients, not from sampling.
  double bound() const { return bound_; }
  /// Torus integral when it has a closed form.
  std::optional<double> torus_mean() const;
  const PotentialSpec& spec() const { return spec_; }

 private:
  PotentialSpec spec_;
  TrigField field_;
  int torus_dim_;
  int coordinate_ = 0;
  double bound_ = 0.0;
};

enum class HamiltonianForm { eikonal, eikonal_drift };

std::string to_string(HamiltonianForm form);
HamiltonianForm hamiltonian_form_from_string(const std::string& name);

/// H(x, p, omega) = |P + p - b(x, omega)|^2 - V(x, omega)^2, with b = 0 for the
/// eikonal form and P the momentum shift.
struct HamiltonianSpec {
  TorusEnvironment env;
  HamiltonianForm form = HamiltonianForm::eikonal;
  PotentialSpec potential;
  /// One flat TrigField coefficient list per physical component (eikonal_drift only).
  std::vector<std::vector<double>> drift;
  Vec shift{0.0, 0.0};
};

/// In every supported form H(x, ., omega) = |p - center|^2 - v2.
struct LocalData {
  double v2 = 0.0;
  Vec center{0.0, 0.0};
};

/// Witnesses of the superlinear bounds alpha(|p|) <= H <= beta(|p|), with
/// B = sup |b - P| and W = sup V.
struct CoercivityBounds {
  double center_bound = 0.0;
  double potential_bound = 0.0;

  double alpha(double r) const {
    double s = r > center_bound ? r - center_bound : 0.0;
    return s * s - potential_bound * potential_bound;
  }
  double beta(double r) const { return (r + center_bound) * (r + center_bound); }
};

class Hamiltonian {
 public:
  explicit Hamiltonian(HamiltonianSpec spec);

  const HamiltonianSpec& spec() const { return spec_; }
  const TorusEnvironment& env() const { return spec_.env; }
  int dim() const { return spec_.env.physical_dim(); }
  const Potential& potential() const { return potential_; }

  LocalData local(const Vec& x, const OmegaPoint& omega) const;
  double potential_value(const Vec& x, const OmegaPoint& omega) const;

  double eval(const Vec& x, const Vec& p, const OmegaPoint& omega) const;
  /// h(x, omega) = min_p H = -V^2, attained at p = b - P.
  double pointwise_min(const Vec& x, const OmegaPoint& omega) const;
  Vec minimizer(const Vec& x, const OmegaPoint& omega) const;

  /// Max of pointwise_min over the lattice resolution * Z^N intersected with the box.
  double sup_pointwise_min(const OmegaPoint& omega, const Box& box, double resolution) const;

  CoercivityBounds coercivity() const;
  /// Sound upper bound on sup{|p| : H(x,p,omega) <= a for some (x, omega)}.
  double kappa(double a) const;
  /// L_R with |H(p) - H(q)| <= L_R |p - q| on B_R.
  double lipschitz_constant(double radius) const;

  Hamiltonian with_shift(const Vec& shift) const;

 private:
  HamiltonianSpec spec_;
  Potential potential_;
  std::vector<TrigField> drift_;
  double drift_bound_ = 0.0;
};

}  // namespace hjm
