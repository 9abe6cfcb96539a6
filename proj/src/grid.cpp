#include "hjm/grid.hpp"

#include <cmath>
#include <numeric>

#include "hjm/errors.hpp"

namespace hjm {

Grid::Grid(const Box& box, double h) : dim_(box.dim), lo_(box.lo), h_(h) {
  if (!(h > 0.0)) throw ConfigError("grid spacing must be positive");
  if (dim_ < 1 || dim_ > kMaxDim) throw ConfigError("grid dimension must be 1 or 2");
  for (int a = 0; a < kMaxDim; ++a) {
    const auto ax = static_cast<std::size_t>(a);
    if (a >= dim_) {
      n_[ax] = 1;
      lo_[ax] = 0.0;
      continue;
    }
    const double span = box.hi[ax] - box.lo[ax];
    if (!(span >= 0.0)) throw ConfigError("box must satisfy lo <= hi");
    const double cells = std::round(span / h);
    if (cells > 4.0e8) throw ConfigError("grid too large");
    n_[ax] = static_cast<int>(cells) + 1;
  }
  if (static_cast<double>(n_[0]) * n_[1] > 2.0e9) throw ConfigError("grid too large");
}

Box Grid::box() const {
  Box b;
  b.dim = dim_;
  b.lo = lo_;
  for (int a = 0; a < kMaxDim; ++a) {
    const auto ax = static_cast<std::size_t>(a);
    b.hi[ax] = lo_[ax] + h_ * (n_[ax] - 1);
  }
  return b;
}

Vec Grid::point(int node) const {
  auto [i, j] = coords(node);
  return {lo_[0] + h_ * i, dim_ > 1 ? lo_[1] + h_ * j : 0.0};
}

int Grid::nearest(const Vec& x) const {
  std::array<int, 2> c{0, 0};
  for (int a = 0; a < dim_; ++a) {
    const auto ax = static_cast<std::size_t>(a);
    const double t = (x[ax] - lo_[ax]) / h_;
    const double r = std::round(t);
    if (r < 0.0 || r > n_[ax] - 1) return -1;
    c[ax] = static_cast<int>(r);
  }
  return index(c[0], c[1]);
}

bool Grid::on_boundary(int node) const {
  auto [i, j] = coords(node);
  if (i == 0 || i == n_[0] - 1) return true;
  return dim_ > 1 && (j == 0 || j == n_[1] - 1);
}

Stencil Stencil::coprime(int dim, int radius) {
  if (radius < 1) throw ConfigError("stencil radius must be at least 1");
  Stencil s;
  s.radius = radius;
  if (dim == 1) {
    s.offsets = {{1, 0}, {-1, 0}};
    return s;
  }
  for (int dj = -radius; dj <= radius; ++dj) {
    for (int di = -radius; di <= radius; ++di) {
      if (di == 0 && dj == 0) continue;
      if (std::gcd(std::abs(di), std::abs(dj)) != 1) continue;
      s.offsets.push_back({di, dj});
    }
  }
  return s;
}

int Stencil::reverse(int k) const {
  const auto& o = offsets[static_cast<std::size_t>(k)];
  for (std::size_t r = 0; r < offsets.size(); ++r) {
    if (offsets[r][0] == -o[0] && offsets[r][1] == -o[1]) return static_cast<int>(r);
  }
  return -1;
}

}  // namespace hjm
