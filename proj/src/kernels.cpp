#include "feyn/kernels.hpp"

#include <cmath>
#include <limits>

#include "feyn/errors.hpp"

namespace feyn {

namespace {

double norm2(const Point& z) {
  double s = 0;
  for (auto& c : z) s += std::norm(c);
  return s;
}

}  // namespace

std::complex<double> heat_kernel(double t, const Point& z) {
  if (!(t > 0)) throw Error(ErrorKind::NonPositiveT, "heat kernel needs t > 0");
  const int d = static_cast<int>(z.size());
  return std::pow(2 * M_PI * t, -d) * std::exp(-norm2(z) / (2 * t));
}

std::vector<std::complex<double>> bm_kernel(const Point& z, const Point& w) {
  if (z.size() != w.size() || z.empty()) throw Error(ErrorKind::InvalidArgument, "bm_kernel: dimension mismatch");
  const int d = static_cast<int>(z.size());
  Point diff(d);
  for (int i = 0; i < d; ++i) diff[i] = z[i] - w[i];
  double r2 = norm2(diff);
  if (r2 == 0) throw Error(ErrorKind::CoincidentPoints, "bm_kernel at z = w");
  double pref = std::tgamma(d) / std::pow(M_PI, d) / std::pow(r2, d);
  std::vector<std::complex<double>> out(d);
  for (int i = 0; i < d; ++i) out[i] = (i % 2 ? -1.0 : 1.0) * pref * std::conj(diff[i]);
  return out;
}

PropagatorComponents propagator_components(double t, const Point& z) {
  if (!(t > 0)) throw Error(ErrorKind::NonPositiveT, "propagator needs t > 0");
  const int d = static_cast<int>(z.size());
  double base = std::exp(-norm2(z) / (2 * t)) / std::pow(M_PI, d);
  PropagatorComponents p;
  p.top = base * std::pow(2 * t, -d);
  // dy^i = dzbar^i / (2t) - zbar^i dt / (2t^2); moving dt to the front costs (-1)^i
  for (int i = 0; i < d; ++i)
    p.dt.push_back((i % 2 ? -1.0 : 1.0) * base * std::pow(2 * t, -(d - 1)) * (-std::conj(z[i]) / (2 * t * t)));
  return p;
}

std::vector<std::complex<double>> regularized_propagator(double eps, double L, const Point& z, const QuadConfig& cfg) {
  if (!(eps > 0)) throw Error(ErrorKind::NonPositiveEpsilon, "regularized propagator needs eps > 0");
  const int d = static_cast<int>(z.size());
  const bool infinite = std::isinf(L);
  // t = eps + x / (1 - x) when L is infinite
  VectorIntegrand f = [&](const double* x, double* out) {
    double t = eps + x[0], jac = 1;
    if (infinite) {
      t = eps + x[0] / (1 - x[0]);
      jac = 1 / ((1 - x[0]) * (1 - x[0]));
    }
    auto p = propagator_components(t, z);
    for (int i = 0; i < d; ++i) {
      out[2 * i] = -p.dt[i].real() * jac;
      out[2 * i + 1] = -p.dt[i].imag() * jac;
    }
  };
  auto r = integrate_box(1, 2 * d, f, {0.0}, {infinite ? 1.0 : L - eps}, cfg);
  std::vector<std::complex<double>> out(d);
  for (int i = 0; i < d; ++i) out[i] = {r.value[2 * i], r.value[2 * i + 1]};
  return out;
}

}  // namespace feyn
