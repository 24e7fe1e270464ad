#pragma once

#include <vector>

#include "feyn/graph.hpp"
#include "feyn/quadrature.hpp"

namespace feyn {

// Chart of compactified Schwinger space attached to a chain S1 > S2 > ... > Sm.
// Blow-down: t_e = (prod over levels i with e in S_i of rho_i) * xi_e for e in S1.
class CornerChart {
 public:
  CornerChart(int num_edges, std::vector<EdgeSubset> chain);
  int num_edges() const { return num_edges_; }
  int levels() const { return static_cast<int>(chain_.size()); }
  const std::vector<EdgeSubset>& chain() const { return chain_; }
  // Deepest level containing e (1-based), 0 when e is outside S1.
  int level_of(int e) const;

 private:
  int num_edges_;
  std::vector<EdgeSubset> chain_;
};

struct ChartPoint {
  std::vector<double> rho;     // one per chain level
  std::vector<double> coords;  // per edge: xi_e for e in S1, t_e otherwise
};

// One residual per level: sum over e in S_l of (t_e / (rho_1...rho_l))^2 - 1.
std::vector<double> chart_constraint_residuals(const CornerChart& chart, const ChartPoint& p);
std::vector<double> blow_down(const CornerChart& chart, const ChartPoint& p, double tol = 1e-9);
ChartPoint lift_interior(const std::vector<double>& t, const CornerChart& chart);

enum class FaceSide { Origin, Outer };

struct BoundaryFace {
  FaceSide side = FaceSide::Origin;
  EdgeSubset subset;  // shrinking edges for origin faces, the pinned edge for outer faces
  int edge = -1;      // outer faces only
  double L = 0;       // outer faces only
  int sign = 1;
  std::vector<int> pinned_levels;  // chart levels with rho = 0
};

std::vector<BoundaryFace> boundary_decomposition(const DecoratedGraph& g, double L);

// Maps u in the open unit cube of dimension k-1 to xi on the positive orthant of
// the unit sphere in R^k; returns the density of the surface measure. Points with
// some xi_e below kSphereFaceCutoff get density 0: the integrands are bounded
// there, but evaluating them in floating point loses about log10(1/xi_e) digits.
inline constexpr double kSphereFaceCutoff = 1e-10;
double sphere_from_cube(int k, const double* u, double* xi);

// Integrates f over {xi in R^k : |xi| = 1, xi > 0}. k = 1 is the single point xi = 1.
VectorResult sphere_integrate(int k, int ncomp, const VectorIntegrand& f, const QuadConfig& cfg);

IntegralResult boundary_sphere_quadrature(const EdgeSubset& sub,
                                          const std::function<std::complex<double>(const double* xi)>& f,
                                          const QuadConfig& cfg);

}  // namespace feyn
