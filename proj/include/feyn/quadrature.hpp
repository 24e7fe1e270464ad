#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace feyn {

struct QuadConfig {
  double rtol = 1e-6;
  double atol = 1e-12;
  long max_evals = 4'000'000;
  int threads = 1;
};

struct IntegralResult {
  std::complex<double> value;
  double error = 0.0;
  long evaluations = 0;
};

struct VectorResult {
  std::vector<double> value;
  std::vector<double> error;
  long evaluations = 0;
  double error_norm() const;
};

// out has ncomp entries; must be a pure function of x.
using VectorIntegrand = std::function<void(const double* x, double* out)>;

// Adaptive cubature over the box [lo, hi]. Genz-Malik 7/5 for dim >= 2,
// Gauss-Kronrod 7/15 for dim 1. Converged when the Euclidean norm of the
// error vector is below max(atol, rtol * |value|). Throws NonConvergence.
VectorResult integrate_box(int dim, int ncomp, const VectorIntegrand& f, const std::vector<double>& lo,
                           const std::vector<double>& hi, const QuadConfig& cfg);

IntegralResult integrate_box_complex(int dim, const std::function<std::complex<double>(const double*)>& f,
                                     const std::vector<double>& lo, const std::vector<double>& hi,
                                     const QuadConfig& cfg);

// Runs body(i) for i in [0, n) on up to `threads` workers.
void parallel_for(int n, int threads, const std::function<void(int)>& body);

}  // namespace feyn
