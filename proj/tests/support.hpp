#pragma once

#include <random>

#include "mxw/core.hpp"

namespace testing_support {

inline double max_entry(const mxw::CMat& m) { return m.cwiseAbs().maxCoeff(); }

inline mxw::cd random_omega(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> re(-5.0, 5.0), lg(-3.0, 1.0), sg(0.0, 1.0);
  const double im = std::pow(10.0, lg(rng)) * (sg(rng) < 0.5 ? -1.0 : 1.0);
  return {re(rng), im};
}

inline mxw::Wavevector random_xi(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_real_distribution<double> lg(-2.0, 2.0);
  mxw::Wavevector x(dim);
  for (int k = 0; k < dim; ++k) x[k] = nd(rng);
  return x * (std::pow(10.0, lg(rng)) / x.norm());
}

}  // namespace testing_support
