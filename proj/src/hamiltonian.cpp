#include "hjm/hamiltonian.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "hjm/errors.hpp"

namespace hjm {

TrigField TrigField::from_flat(std::span<const double> coeffs, int torus_dim) {
  if (coeffs.empty()) return TrigField{};
  const std::size_t stride = static_cast<std::size_t>(torus_dim) + 2;
  if ((coeffs.size() - 1) % stride != 0) {
    throw ConfigError("trigonometric coefficients must be [c0, (k_1..k_d, a, b)*] with d = " +
                      std::to_string(torus_dim));
  }
  std::vector<Term> terms;
  for (std::size_t pos = 1; pos < coeffs.size(); pos += stride) {
    Term t;
    for (int i = 0; i < torus_dim; ++i) {
      double k = coeffs[pos + static_cast<std::size_t>(i)];
      if (k != std::round(k)) throw ConfigError("Fourier wave numbers must be integers");
      t.k.push_back(static_cast<int>(k));
    }
    t.cos_coef = coeffs[pos + static_cast<std::size_t>(torus_dim)];
    t.sin_coef = coeffs[pos + static_cast<std::size_t>(torus_dim) + 1];
    terms.push_back(std::move(t));
  }
  return TrigField(coeffs[0], std::move(terms));
}

std::vector<double> TrigField::to_flat() const {
  std::vector<double> out{constant_};
  for (const auto& t : terms_) {
    for (int k : t.k) out.push_back(static_cast<double>(k));
    out.push_back(t.cos_coef);
    out.push_back(t.sin_coef);
  }
  return out;
}

double TrigField::eval(std::span<const double> theta) const {
  double v = constant_;
  for (const auto& t : terms_) {
    double arg = 0.0;
    for (std::size_t i = 0; i < t.k.size(); ++i) arg += t.k[i] * theta[i];
    arg = 2.0 * kPi * frac(arg);
    if (t.cos_coef != 0.0) v += t.cos_coef * std::cos(arg);
    if (t.sin_coef != 0.0) v += t.sin_coef * std::sin(arg);
  }
  return v;
}

double TrigField::l1_bound() const {
  double b = std::abs(constant_);
  for (const auto& t : terms_) b += std::abs(t.cos_coef) + std::abs(t.sin_coef);
  return b;
}

std::string to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::product_quasiperiodic: return "product_quasiperiodic";
    case PotentialKind::single_cosine_1d: return "single_cosine_1d";
    case PotentialKind::constant: return "constant";
    case PotentialKind::user_trigonometric: return "user_trigonometric";
  }
  return "constant";
}

PotentialKind potential_kind_from_string(const std::string& name) {
  if (name == "product_quasiperiodic") return PotentialKind::product_quasiperiodic;
  if (name == "single_cosine_1d") return PotentialKind::single_cosine_1d;
  if (name == "constant") return PotentialKind::constant;
  if (name == "user_trigonometric") return PotentialKind::user_trigonometric;
  throw ConfigError("unknown potential kind: " + name);
}

std::string to_string(HamiltonianForm form) {
  return form == HamiltonianForm::eikonal ? "eikonal" : "eikonal_drift";
}

HamiltonianForm hamiltonian_form_from_string(const std::string& name) {
  if (name == "eikonal") return HamiltonianForm::eikonal;
  if (name == "eikonal_drift") return HamiltonianForm::eikonal_drift;
  throw ConfigError("unknown hamiltonian form: " + name);
}

Potential::Potential(const PotentialSpec& spec, int torus_dim) : spec_(spec), torus_dim_(torus_dim) {
  switch (spec_.kind) {
    case PotentialKind::product_quasiperiodic:
      if (torus_dim % 2 != 0) {
        throw ConfigError("product_quasiperiodic needs an even torus dimension");
      }
      bound_ = std::pow(4.0, torus_dim / 2);
      break;
    case PotentialKind::single_cosine_1d: {
      double amplitude = spec_.coeffs.empty() ? 1.0 : spec_.coeffs[0];
      coordinate_ = spec_.coeffs.size() > 1 ? static_cast<int>(spec_.coeffs[1]) : 0;
      if (coordinate_ < 0 || coordinate_ >= torus_dim) {
        throw ConfigError("single_cosine_1d coordinate out of range");
      }
      bound_ = std::abs(amplitude);
      break;
    }
    case PotentialKind::constant:
      if (spec_.coeffs.size() != 1) throw ConfigError("constant potential takes one coefficient");
      bound_ = std::abs(spec_.coeffs[0]);
      break;
    case PotentialKind::user_trigonometric:
      field_ = TrigField::from_flat(spec_.coeffs, torus_dim);
      bound_ = field_.l1_bound();
      break;
  }
}

double Potential::on_torus(std::span<const double> theta) const {
  switch (spec_.kind) {
    case PotentialKind::product_quasiperiodic: {
      double v = 1.0;
      for (int i = 0; i + 1 < torus_dim_; i += 2) {
        v *= 2.0 - std::cos(2.0 * kPi * theta[static_cast<std::size_t>(i)]) -
             std::cos(2.0 * kPi * theta[static_cast<std::size_t>(i) + 1]);
      }
      return v;
    }
    case PotentialKind::single_cosine_1d:
      return bound_ * std::sin(kPi * theta[static_cast<std::size_t>(coordinate_)]);
    case PotentialKind::constant:
      return bound_;
    case PotentialKind::user_trigonometric:
      return std::abs(field_.eval(theta));
  }
  return 0.0;
}

std::optional<double> Potential::torus_mean() const {
  switch (spec_.kind) {
    case PotentialKind::product_quasiperiodic: return std::pow(2.0, torus_dim_ / 2);
    case PotentialKind::single_cosine_1d: return 2.0 * bound_ / kPi;
    case PotentialKind::constant: return bound_;
    case PotentialKind::user_trigonometric: {
      double oscillation = field_.l1_bound() - std::abs(field_.constant());
      if (std::abs(field_.constant()) >= oscillation) return std::abs(field_.constant());
      return std::nullopt;
    }
  }
  return std::nullopt;
}

Hamiltonian::Hamiltonian(HamiltonianSpec spec)
    : spec_(std::move(spec)), potential_(spec_.potential, spec_.env.torus_dim()) {
  const int n = spec_.env.physical_dim();
  if (spec_.form == HamiltonianForm::eikonal_drift) {
    if (static_cast<int>(spec_.drift.size()) != n) {
      throw ConfigError("eikonal_drift needs one drift coefficient list per physical component");
    }
    double sq = 0.0;
    for (const auto& coeffs : spec_.drift) {
      drift_.push_back(TrigField::from_flat(coeffs, spec_.env.torus_dim()));
      sq += drift_.back().l1_bound() * drift_.back().l1_bound();
    }
    drift_bound_ = std::sqrt(sq);
  } else if (!spec_.drift.empty()) {
    throw ConfigError("drift coefficients given for the eikonal form");
  }
  for (int i = n; i < kMaxDim; ++i) {
    if (spec_.shift[static_cast<std::size_t>(i)] != 0.0) {
      throw ConfigError("shift has more components than the physical dimension");
    }
  }
}

LocalData Hamiltonian::local(const Vec& x, const OmegaPoint& omega) const {
  std::array<double, kMaxTorusDim> theta{};
  spec_.env.phases(omega, x, theta);
  LocalData out;
  double v = potential_.on_torus(theta);
  out.v2 = v * v;
  for (std::size_t i = 0; i < drift_.size(); ++i) out.center[i] = drift_[i].eval(theta);
  out.center = out.center - spec_.shift;
  return out;
}

double Hamiltonian::potential_value(const Vec& x, const OmegaPoint& omega) const {
  std::array<double, kMaxTorusDim> theta{};
  spec_.env.phases(omega, x, theta);
  return potential_.on_torus(theta);
}

double Hamiltonian::eval(const Vec& x, const Vec& p, const OmegaPoint& omega) const {
  LocalData d = local(x, omega);
  Vec r = p - d.center;
  return dot(r, r) - d.v2;
}

double Hamiltonian::pointwise_min(const Vec& x, const OmegaPoint& omega) const {
  double v = potential_value(x, omega);
  return -v * v;
}

Vec Hamiltonian::minimizer(const Vec& x, const OmegaPoint& omega) const { return local(x, omega).center; }

double Hamiltonian::sup_pointwise_min(const OmegaPoint& omega, const Box& box, double resolution) const {
  if (!(resolution > 0.0)) throw ConfigError("resolution must be positive");
  const int n = dim();
  std::array<long, kMaxDim> first{0, 0}, last{0, 0};
  for (int i = 0; i < n; ++i) {
    first[static_cast<std::size_t>(i)] = static_cast<long>(std::ceil(box.lo[static_cast<std::size_t>(i)] / resolution));
    last[static_cast<std::size_t>(i)] = static_cast<long>(std::floor(box.hi[static_cast<std::size_t>(i)] / resolution));
  }
  double best = -std::numeric_limits<double>::infinity();
  for (long i = first[0]; i <= last[0]; ++i) {
    for (long j = first[1]; j <= last[1]; ++j) {
      Vec x{static_cast<double>(i) * resolution, static_cast<double>(j) * resolution};
      best = std::max(best, pointwise_min(x, omega));
    }
  }
  return best;
}

CoercivityBounds Hamiltonian::coercivity() const {
  return CoercivityBounds{drift_bound_ + norm(spec_.shift), potential_.bound()};
}

double Hamiltonian::kappa(double a) const {
  CoercivityBounds c = coercivity();
  double r2 = a + c.potential_bound * c.potential_bound;
  return c.center_bound + std::sqrt(std::max(r2, 0.0));
}

double Hamiltonian::lipschitz_constant(double radius) const {
  return 2.0 * (radius + coercivity().center_bound);
}

Hamiltonian Hamiltonian::with_shift(const Vec& shift) const {
  HamiltonianSpec s = spec_;
  s.shift = shift;
  return Hamiltonian(std::move(s));
}

}  // namespace hjm
