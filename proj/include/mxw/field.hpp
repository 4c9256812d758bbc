#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "mxw/core.hpp"

namespace mxw {

// Periodic box with n points per axis; x_j = j * length / n.
struct Grid {
  int dim = 2;
  int n = 4;
  std::array<double, 3> length{1.0, 1.0, 1.0};

  static Grid make(int dim, int n, std::array<double, 3> length);
  static Grid make(int dim, int n, double length) { return make(dim, n, {length, length, length}); }

  std::size_t points() const;
  double spacing(int axis) const { return length[axis] / n; }
  double cell_volume() const;
  double box_volume() const;
  // Signed integer frequency index of storage index i (FFT order).
  int mode(int i) const { return i < n / 2 ? i : i - n; }
  double frequency(int axis, int i) const;
  // Wavevector at a flat storage index.
  Wavevector wavevector_at(std::size_t flat) const;
  void unflatten(std::size_t flat, int idx[3]) const;
  std::size_t flatten(const int idx[3]) const;
  bool operator==(const Grid& o) const;
};

// m(d)-component (or scalar) complex samples, component-major.
struct Field {
  Grid grid;
  int ncomp = 1;
  std::vector<cd> data;

  Field() = default;
  Field(const Grid& g, int nc) : grid(g), ncomp(nc), data(nc * g.points(), cd(0.0)) {}

  std::size_t points() const { return grid.points(); }
  cd* component(int c) { return data.data() + c * grid.points(); }
  const cd* component(int c) const { return data.data() + c * grid.points(); }
  cd& at(int c, std::size_t p) { return data[c * grid.points() + p]; }
  const cd& at(int c, std::size_t p) const { return data[c * grid.points() + p]; }

  Field extract(int c) const;
  void insert(int c, const Field& scalar);
};

Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(cd s, const Field& a);

// Relative and absolute discrete L2 helpers used throughout the tests.
double l2_norm(const Field& f);
double rel_l2_diff(const Field& a, const Field& b);
double max_abs(const Field& f);

}  // namespace mxw
