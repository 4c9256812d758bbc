#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace mxw {

using cd = std::complex<double>;

// Dense matrices never exceed 6x6, so keep them on the stack.
using CMat = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, 0, 6, 6>;
using CVec = Eigen::Matrix<cd, Eigen::Dynamic, 1, 0, 6, 1>;
using RVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;
using RMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;

using SymbolMatrix = CMat;
using Wavevector = RVec;

constexpr double pi = 3.14159265358979323846;
constexpr cd I{0.0, 1.0};

enum class ErrorKind {
  InvalidArgument,
  InvalidMaterial,
  DegenerateDirection,
  NotPartiallyAnisotropic,
  NonFiniteSymbol,
  RealFrequency,
  MeanNotZero,
  QuadratureNotConverged,
  MethodsDisagree,
  OnSingularSet,
  EmptyRegion,
  ExponentOrder,
  Io,
};

const char* error_name(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_name(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline int ncomp_for_dim(int dim) { return dim == 2 ? 3 : 6; }

inline Wavevector wavevector(double x, double y) {
  Wavevector v(2);
  v << x, y;
  return v;
}

inline Wavevector wavevector(double x, double y, double z) {
  Wavevector v(3);
  v << x, y, z;
  return v;
}

}  // namespace mxw
