#pragma once

#include <array>
#include <vector>

#include "hjm/geometry.hpp"

namespace hjm {

/// Uniform lattice lo + h * (i, j) covering a box; x varies fastest.
class Grid {
 public:
  Grid() = default;
  /// Node counts are round((hi - lo) / h) + 1 per axis.
  Grid(const Box& box, double h);

  int dim() const { return dim_; }
  double h() const { return h_; }
  const Vec& lo() const { return lo_; }
  int extent(int axis) const { return n_[static_cast<std::size_t>(axis)]; }
  int size() const { return n_[0] * n_[1]; }
  Box box() const;

  int index(int i, int j) const { return j * n_[0] + i; }
  std::array<int, 2> coords(int node) const { return {node % n_[0], node / n_[0]}; }
  bool in_range(int i, int j) const { return i >= 0 && j >= 0 && i < n_[0] && j < n_[1]; }
  Vec point(int node) const;
  /// Nearest node to x, or -1 when x lies outside the box by more than h/2.
  int nearest(const Vec& x) const;
  bool on_boundary(int node) const;

  bool operator==(const Grid&) const = default;

 private:
  int dim_ = 1;
  Vec lo_{0.0, 0.0};
  double h_ = 1.0;
  std::array<int, 2> n_{1, 1};
};

/// Lattice offsets with Chebyshev norm <= radius and coprime components
/// (each direction appears once, at its shortest lattice length).
struct Stencil {
  int radius = 1;
  std::vector<std::array<int, 2>> offsets;

  static Stencil coprime(int dim, int radius);
  /// Index of -offsets[k].
  int reverse(int k) const;
};

}  // namespace hjm
