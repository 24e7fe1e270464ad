#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "feyn/amplitude.hpp"

namespace feyn {

struct VanishingCertificate {
  bool vanishes = false;
  int power = 0;                           // d|V| - (d-1)|E| - components*(d+1)
  std::optional<EdgeSubset> violating;     // a connected subgraph breaking the dimension count
  std::string describe() const;
};

VanishingCertificate anomaly_vanishes_exactly(const DecoratedGraph& g, int d);

// Constant-coefficient holomorphic operator stored through its action on plane
// waves exp(k.w): one polynomial in the relative momenta per dwbar selection.
struct AnomalySymbol {
  int dim = 1;
  int num_relative = 0;
  int order = 0;        // total degree of every monomial
  int form_degree = 0;  // relative dwbar degree of the test forms it pairs with
  struct Block {
    std::uint64_t selection = 0;
    std::map<std::vector<int>, double> coefficients;  // exponents over k_{i*d+j}
    std::map<std::vector<int>, double> errors;
  };
  std::vector<Block> blocks;
  double error = 0;
  long evaluations = 0;

  cplx evaluate(std::uint64_t selection, const std::vector<cplx>& k) const;
};

AnomalySymbol anomaly_symbol(const DecoratedGraph& g, const QuadConfig& cfg);
cplx o_apply(const AnomalySymbol& sym, const TestForm& phi);

// Boundary integral of the Gaussian-paired (|E|-1)-form over the sphere of the
// given radius, pulled back with the normal-first orientation.
IntegralResult boundary_integral_at_radius(const FormEngine& eng, const TestForm& phi, std::uint64_t selection,
                                           double radius, const QuadConfig& cfg);

struct BoundaryMagnitude {
  double magnitude = 0;  // max over selections of |G(radius)|
  double error = 0;
  double radius = 0;
  int selections = 0;
};
BoundaryMagnitude boundary_magnitude(const DecoratedGraph& g, const TestForm& phi, double radius,
                                     const QuadConfig& cfg);

struct QuadraticTerm {
  EdgeSubset subset;
  bool laman = false;
  int orientation = 1;  // induced boundary orientation of the face
  int parity_sign = 1;   // (-1)^{(d+1) sigma}
  cplx value;           // face integral in product orientation
  double error = 0;
};

struct QuadraticReport {
  std::vector<QuadraticTerm> terms;
  cplx residual;          // sum over Laman faces of orientation * value
  cplx non_laman_sum;     // should vanish in the limit
  double max_term = 0;
  double relative = 0;
  double error = 0;
  int selections = 0;
};

QuadraticReport quadratic_residual(const DecoratedGraph& g, const TestForm& phi, const QuadConfig& cfg,
                                   double face_radius = 1e-7);

// Sum over outer faces t_e = L and over test-form selections of |face integral|.
std::vector<double> outer_boundary_decay(const DecoratedGraph& g, const TestForm& phi, const std::vector<double>& Ls,
                                         const QuadConfig& cfg);

// Face orientation computed from explicit frames.
int face_orientation(int num_edges, const EdgeSubset& sub);

}  // namespace feyn
