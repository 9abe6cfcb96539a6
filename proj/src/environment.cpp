#include "hjm/environment.hpp"

#include <cmath>
#include <random>

#include "hjm/errors.hpp"

namespace hjm {

double frac(double t) {
  double r = t - std::floor(t);
  return r >= 1.0 ? 0.0 : r;
}

double golden_ratio() { return (1.0 + std::sqrt(5.0)) / 2.0; }

TorusEnvironment::TorusEnvironment(int torus_dim, int physical_dim, std::vector<double> flow_matrix,
                                   std::uint64_t seed)
    : torus_dim_(torus_dim), physical_dim_(physical_dim), flow_(std::move(flow_matrix)), seed_(seed) {
  if (torus_dim_ < 1 || torus_dim_ > kMaxTorusDim) {
    throw ConfigError("torus.dim must be in [1, " + std::to_string(kMaxTorusDim) + "]");
  }
  if (physical_dim_ < 1 || physical_dim_ > kMaxDim) {
    throw ConfigError("physical dimension must be 1 or 2");
  }
  if (flow_.size() != static_cast<std::size_t>(torus_dim_ * physical_dim_)) {
    throw ConfigError("torus.flow_matrix must hold dim x N entries (row-major)");
  }
  for (double v : flow_) {
    if (!std::isfinite(v)) throw ConfigError("torus.flow_matrix entries must be finite");
  }
}

TorusEnvironment TorusEnvironment::product_flow(double lambda, std::uint64_t seed) {
  return TorusEnvironment(4, 2, {1.0, 0.0, lambda, 0.0, 0.0, 1.0, 0.0, lambda}, seed);
}

TorusEnvironment TorusEnvironment::periodic(int physical_dim, std::uint64_t seed) {
  std::vector<double> flow(static_cast<std::size_t>(physical_dim * physical_dim), 0.0);
  for (int i = 0; i < physical_dim; ++i) flow[static_cast<std::size_t>(i * physical_dim + i)] = 1.0;
  return TorusEnvironment(physical_dim, physical_dim, std::move(flow), seed);
}

TorusEnvironment TorusEnvironment::with_seed(std::uint64_t seed) const {
  TorusEnvironment copy = *this;
  copy.seed_ = seed;
  return copy;
}

OmegaPoint TorusEnvironment::sample_omega(std::uint64_t k) const {
  std::seed_seq seq{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32),
                    static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
  std::mt19937_64 gen(seq);
  OmegaPoint omega;
  omega.coords.resize(static_cast<std::size_t>(torus_dim_));
  for (auto& c : omega.coords) c = static_cast<double>(gen() >> 11) * 0x1.0p-53;
  return omega;
}

OmegaPoint TorusEnvironment::origin() const {
  return OmegaPoint{std::vector<double>(static_cast<std::size_t>(torus_dim_), 0.0)};
}

void TorusEnvironment::phases(const OmegaPoint& omega, const Vec& x, std::span<double> out) const {
  for (int i = 0; i < torus_dim_; ++i) {
    double shift = 0.0;
    for (int j = 0; j < physical_dim_; ++j) shift += flow(i, j) * x[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = frac(omega.coords[static_cast<std::size_t>(i)] + shift);
  }
}

OmegaPoint TorusEnvironment::translate(const OmegaPoint& omega, const Vec& x) const {
  OmegaPoint out;
  out.coords.resize(static_cast<std::size_t>(torus_dim_));
  phases(omega, x, out.coords);
  return out;
}

bool TorusEnvironment::full_rank() const {
  // Gaussian elimination on a copy; N <= 2 so this is tiny.
  std::vector<double> m = flow_;
  int rank = 0;
  for (int col = 0; col < physical_dim_ && rank < torus_dim_; ++col) {
    int pivot = -1;
    double best = 1e-12;
    for (int r = rank; r < torus_dim_; ++r) {
      double v = std::abs(m[static_cast<std::size_t>(r * physical_dim_ + col)]);
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (pivot < 0) continue;
    for (int c = 0; c < physical_dim_; ++c) {
      std::swap(m[static_cast<std::size_t>(rank * physical_dim_ + c)],
                m[static_cast<std::size_t>(pivot * physical_dim_ + c)]);
    }
    for (int r = rank + 1; r < torus_dim_; ++r) {
      double f = m[static_cast<std::size_t>(r * physical_dim_ + col)] /
                 m[static_cast<std::size_t>(rank * physical_dim_ + col)];
      for (int c = 0; c < physical_dim_; ++c) {
        m[static_cast<std::size_t>(r * physical_dim_ + c)] -=
            f * m[static_cast<std::size_t>(rank * physical_dim_ + c)];
      }
    }
    ++rank;
  }
  return rank == physical_dim_;
}

}  // namespace hjm
