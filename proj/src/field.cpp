#include "mxw/field.hpp"

#include <cmath>

namespace mxw {

Grid Grid::make(int dim, int n, std::array<double, 3> length) {
  if (dim != 2 && dim != 3) throw Error(ErrorKind::InvalidArgument, "grid dimension must be 2 or 3");
  if (n < 4 || (n & (n - 1)) != 0) throw Error(ErrorKind::InvalidArgument, "grid n must be a power of two and at least 4");
  for (int a = 0; a < dim; ++a)
    if (!(length[a] > 0.0) || !std::isfinite(length[a]))
      throw Error(ErrorKind::InvalidArgument, "grid length must be positive and finite");
  Grid g;
  g.dim = dim;
  g.n = n;
  g.length = length;
  if (dim == 2) g.length[2] = 1.0;
  return g;
}

std::size_t Grid::points() const {
  std::size_t p = 1;
  for (int a = 0; a < dim; ++a) p *= static_cast<std::size_t>(n);
  return p;
}

double Grid::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim; ++a) v *= spacing(a);
  return v;
}

double Grid::box_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim; ++a) v *= length[a];
  return v;
}

double Grid::frequency(int axis, int i) const { return 2.0 * pi * mode(i) / length[axis]; }

void Grid::unflatten(std::size_t flat, int idx[3]) const {
  for (int a = dim - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % n);
    flat /= n;
  }
}

std::size_t Grid::flatten(const int idx[3]) const {
  std::size_t f = 0;
  for (int a = 0; a < dim; ++a) f = f * n + static_cast<std::size_t>(idx[a]);
  return f;
}

Wavevector Grid::wavevector_at(std::size_t flat) const {
  int idx[3];
  unflatten(flat, idx);
  Wavevector xi(dim);
  for (int a = 0; a < dim; ++a) xi[a] = frequency(a, idx[a]);
  return xi;
}

bool Grid::operator==(const Grid& o) const {
  if (dim != o.dim || n != o.n) return false;
  for (int a = 0; a < dim; ++a)
    if (length[a] != o.length[a]) return false;
  return true;
}

Field Field::extract(int c) const {
  Field s(grid, 1);
  std::copy(component(c), component(c) + points(), s.data.begin());
  return s;
}

void Field::insert(int c, const Field& scalar) {
  std::copy(scalar.data.begin(), scalar.data.begin() + points(), component(c));
}

static void check_compatible(const Field& a, const Field& b) {
  if (!(a.grid == b.grid) || a.ncomp != b.ncomp)
    throw Error(ErrorKind::InvalidArgument, "fields live on different grids or have different component counts");
}

Field operator+(const Field& a, const Field& b) {
  check_compatible(a, b);
  Field r = a;
  for (std::size_t i = 0; i < r.data.size(); ++i) r.data[i] += b.data[i];
  return r;
}

Field operator-(const Field& a, const Field& b) {
  check_compatible(a, b);
  Field r = a;
  for (std::size_t i = 0; i < r.data.size(); ++i) r.data[i] -= b.data[i];
  return r;
}

Field operator*(cd s, const Field& a) {
  Field r = a;
  for (auto& v : r.data) v *= s;
  return r;
}

double l2_norm(const Field& f) {
  double s = 0.0;
  for (const auto& v : f.data) s += std::norm(v);
  return std::sqrt(s * f.grid.cell_volume());
}

double rel_l2_diff(const Field& a, const Field& b) {
  check_compatible(a, b);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    num += std::norm(a.data[i] - b.data[i]);
    den += std::norm(b.data[i]);
  }
  if (den == 0.0) return std::sqrt(num);
  return std::sqrt(num / den);
}

double max_abs(const Field& f) {
  double m = 0.0;
  for (const auto& v : f.data) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace mxw
