#include <algorithm>
#include "feyn/schwinger_space.hpp"

#include <cmath>

#include "feyn/errors.hpp"

namespace feyn {

CornerChart::CornerChart(int num_edges, std::vector<EdgeSubset> chain) : num_edges_(num_edges), chain_(std::move(chain)) {
  if (chain_.empty()) throw Error(ErrorKind::EmptySubset, "corner chart needs at least one level");
  for (size_t i = 0; i < chain_.size(); ++i) {
    if (chain_[i].empty()) throw Error(ErrorKind::EmptySubset, "chain levels must be nonempty");
    if (chain_[i].parent_size() != num_edges) throw Error(ErrorKind::InvalidArgument, "chain over wrong edge count");
    if (i > 0 && ((chain_[i].bits() & ~chain_[i - 1].bits()) || chain_[i] == chain_[i - 1]))
      throw Error(ErrorKind::InvalidArgument, "chain must be strictly decreasing");
  }
}

int CornerChart::level_of(int e) const {
  int level = 0;
  for (int i = 0; i < levels(); ++i)
    if (chain_[i].contains(e)) level = i + 1;
  return level;
}

namespace {

void check_shape(const CornerChart& chart, const ChartPoint& p) {
  if (static_cast<int>(p.rho.size()) != chart.levels() || static_cast<int>(p.coords.size()) != chart.num_edges())
    throw Error(ErrorKind::ConstraintViolated, "chart point has wrong shape");
}

}  // namespace

std::vector<double> chart_constraint_residuals(const CornerChart& chart, const ChartPoint& p) {
  check_shape(chart, p);
  std::vector<double> res;
  for (int l = 1; l <= chart.levels(); ++l) {
    double s = 0;
    for (int e : chart.chain()[l - 1].indices()) {
      double scale = p.coords[e];
      for (int j = l + 1; j <= chart.level_of(e); ++j) scale *= p.rho[j - 1];
      s += scale * scale;
    }
    res.push_back(s - 1);
  }
  return res;
}

std::vector<double> blow_down(const CornerChart& chart, const ChartPoint& p, double tol) {
  check_shape(chart, p);
  for (double r : p.rho)
    if (r < 0) throw Error(ErrorKind::ConstraintViolated, "rho must be non-negative");
  for (double r : chart_constraint_residuals(chart, p))
    if (std::abs(r) > tol) throw Error(ErrorKind::ConstraintViolated, "chart sphere constraint violated");
  std::vector<double> t(chart.num_edges());
  for (int e = 0; e < chart.num_edges(); ++e) {
    double v = p.coords[e];
    for (int j = 1; j <= chart.level_of(e); ++j) v *= p.rho[j - 1];
    t[e] = v;
  }
  return t;
}

ChartPoint lift_interior(const std::vector<double>& t, const CornerChart& chart) {
  if (static_cast<int>(t.size()) != chart.num_edges()) throw Error(ErrorKind::InvalidArgument, "wrong t length");
  for (double x : t)
    if (!(x > 0)) throw Error(ErrorKind::NonPositiveT, "lift_interior needs all t_e > 0");
  ChartPoint p;
  std::vector<double> radius;  // |t restricted to S_l| = rho_1 ... rho_l
  for (auto& s : chart.chain()) {
    double r = 0;
    for (int e : s.indices()) r += t[e] * t[e];
    radius.push_back(std::sqrt(r));
  }
  for (int l = 0; l < chart.levels(); ++l) p.rho.push_back(l == 0 ? radius[0] : radius[l] / radius[l - 1]);
  p.coords = t;
  for (int e = 0; e < chart.num_edges(); ++e) {
    int level = chart.level_of(e);
    if (level > 0) p.coords[e] = t[e] / radius[level - 1];
  }
  return p;
}

std::vector<BoundaryFace> boundary_decomposition(const DecoratedGraph& g, double L) {
  g.require_simple_connected();
  const int m = g.num_edges();
  std::vector<BoundaryFace> faces;
  std::vector<EdgeSubset> subsets;
  for (std::uint64_t bits = 1; bits < (std::uint64_t{1} << m); ++bits) subsets.emplace_back(m, bits);
  std::sort(subsets.begin(), subsets.end(), [](const EdgeSubset& a, const EdgeSubset& b) { return a.lex_less(b); });
  for (auto& s : subsets) {
    BoundaryFace f;
    f.side = FaceSide::Origin;
    f.subset = s;
    f.sign = permutation_sign(g, s);
    f.pinned_levels = {1};
    faces.push_back(f);
  }
  for (int e = 0; e < m; ++e) {
    BoundaryFace f;
    f.side = FaceSide::Outer;
    f.subset = EdgeSubset::of(m, {e});
    f.edge = e;
    f.L = L;
    f.sign = e % 2 ? -1 : 1;  // outward normal +dt_e placed first among dt_1..dt_m
    faces.push_back(f);
  }
  return faces;
}

double sphere_from_cube(int k, const double* u, double* xi) {
  // stick-breaking onto the simplex, then radial projection
  double rest = 1, jac = 1;
  for (int i = 0; i < k - 1; ++i) {
    xi[i] = rest * u[i];
    if (i < k - 2) jac *= std::pow(1 - u[i], k - 2 - i);
    rest *= 1 - u[i];
  }
  xi[k - 1] = rest;
  double n2 = 0;
  for (int i = 0; i < k; ++i) n2 += xi[i] * xi[i];
  double n = std::sqrt(n2);
  for (int i = 0; i < k; ++i) xi[i] /= n;
  if (*std::min_element(xi, xi + k) < kSphereFaceCutoff) return 0;
  return jac / std::pow(n, k);
}

VectorResult sphere_integrate(int k, int ncomp, const VectorIntegrand& f, const QuadConfig& cfg) {
  if (k < 1) throw Error(ErrorKind::EmptySubset, "sphere of an empty edge set");
  if (k == 1) {
    double one = 1;
    VectorResult r;
    r.value.assign(ncomp, 0);
    r.error.assign(ncomp, 0);
    f(&one, r.value.data());
    r.evaluations = 1;
    return r;
  }
  VectorIntegrand g = [&](const double* u, double* out) {
    std::vector<double> xi(k);
    double w = sphere_from_cube(k, u, xi.data());
    if (w == 0) {
      std::fill(out, out + ncomp, 0.0);
      return;
    }
    f(xi.data(), out);
    for (int c = 0; c < ncomp; ++c) out[c] *= w;
  };
  return integrate_box(k - 1, ncomp, g, std::vector<double>(k - 1, 0.0), std::vector<double>(k - 1, 1.0), cfg);
}

IntegralResult boundary_sphere_quadrature(const EdgeSubset& sub,
                                          const std::function<std::complex<double>(const double* xi)>& f,
                                          const QuadConfig& cfg) {
  if (sub.empty()) throw Error(ErrorKind::EmptySubset, "boundary sphere of an empty subset");
  VectorIntegrand g = [&](const double* xi, double* out) {
    auto v = f(xi);
    out[0] = v.real();
    out[1] = v.imag();
  };
  auto r = sphere_integrate(sub.size(), 2, g, cfg);
  return IntegralResult{{r.value[0], r.value[1]}, r.error_norm(), r.evaluations};
}

}  // namespace feyn
