#pragma once

#include <complex>
#include <vector>

#include "feyn/quadrature.hpp"

namespace feyn {

using Point = std::vector<std::complex<double>>;  // a point of C^d

// Coefficient of d^d zbar: (2 pi t)^-d exp(-|z|^2 / (2t)).
std::complex<double> heat_kernel(double t, const Point& z);

// Coefficients of prod_{j != i} d(zbar^j - wbar^j), i = 0..d-1.
std::vector<std::complex<double>> bm_kernel(const Point& z, const Point& w);

// Components of P_t(z) = pi^-d exp(-z.y) dy^1 ^ ... ^ dy^d with y = zbar / (2t).
struct PropagatorComponents {
  std::complex<double> top;                // coefficient of d^d zbar (equals the heat kernel)
  std::vector<std::complex<double>> dt;   // coefficient of dt ^ prod_{j != i} dzbar^j
};
PropagatorComponents propagator_components(double t, const Point& z);

// int_eps^L dbar^* H dt, i.e. minus the dt components integrated over t.
std::vector<std::complex<double>> regularized_propagator(double eps, double L, const Point& z,
                                                         const QuadConfig& cfg = {});

}  // namespace feyn
