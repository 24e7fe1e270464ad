#pragma once

#include <Eigen/Dense>
#include <map>
#include <vector>

#include "feyn/graph.hpp"
#include "feyn/symbolic.hpp"

namespace feyn {

template <class T>
using Matrix = std::vector<std::vector<T>>;

VarList schwinger_vars(int num_edges);  // t1..tm

struct LaplacianData {
  VarList vars;
  Matrix<RationalFunction> M;
  Polynomial tree_polynomial;
  Polynomial edge_product;    // prod_e t_e
  Matrix<Polynomial> scaled;  // M * edge_product, polynomial entries
};

LaplacianData weighted_laplacian(const DecoratedGraph& g);
Polynomial kirchhoff_polynomial(const DecoratedGraph& g);

// Fraction-free elimination; the matrix must be square.
Polynomial bareiss_determinant(Matrix<Polynomial> a);
RationalFunction laplacian_determinant(const LaplacianData& lap);
bool kirchhoff_identity_holds(const LaplacianData& lap);

struct InverseData {
  Polynomial denominator;        // Kirchhoff polynomial
  Matrix<Polynomial> numerators;  // cut sums
  Matrix<RationalFunction> entries;
};

// Cut formula; throws Assertion if M * M^-1 != Id.
InverseData m_inverse(const DecoratedGraph& g, const LaplacianData& lap);
InverseData m_inverse(const DecoratedGraph& g);
bool inverse_identity_holds(const LaplacianData& lap, const InverseData& inv);

struct DInverseData {
  Polynomial denominator;            // Kirchhoff polynomial
  Matrix<Polynomial> numerators;     // sum_i rho^e_i C_ij, so d^-1 = num / (t_e K)
  Matrix<Polynomial> reduced;        // num / t_e
  Matrix<Polynomial> cut_plus;       // Cut({j,h(e)},{n,t(e)}) / t_e
  Matrix<Polynomial> cut_minus;      // Cut({j,t(e)},{n,h(e)}) / t_e
  Matrix<RationalFunction> entries;  // rows = edges, cols = vertices 1..n-1
};

// Throws Assertion when the numerator-inclusion property fails.
DInverseData d_inverse(const DecoratedGraph& g, const InverseData& inv);
DInverseData d_inverse(const DecoratedGraph& g);
bool numerator_inclusion_holds(const DecoratedGraph& g, const DInverseData& dinv);

struct CornerTerm {
  int rho_degree;
  Polynomial coefficient;  // over xi_e (e in sub) and t_e (e not in sub)
};

VarList corner_vars(int num_edges, const EdgeSubset& sub);
// p must be a polynomial in t1..tm.
std::vector<CornerTerm> corner_expand(const Polynomial& p, const EdgeSubset& sub);
// Nested chain S1 > S2 > ... ; keys are the rho_1..rho_m degree vectors.
std::map<std::vector<int>, Polynomial> corner_expand_chain(const Polynomial& p, const std::vector<EdgeSubset>& chain);

int min_rho_power_of_boundary(const DecoratedGraph& g, int d, int chain_length);

// ---- numeric helpers used by the quadrature modules
Eigen::MatrixXd incidence_eigen(const DecoratedGraph& g);
Eigen::MatrixXd laplacian_numeric(const Eigen::MatrixXd& rho, const Eigen::VectorXd& t);
Eigen::MatrixXd d_inverse_numeric(const Eigen::MatrixXd& rho, const Eigen::VectorXd& t);

// Inverse and log-determinant of rho^T diag(edge_scale / t) rho + shift * I by
// subtraction-free elimination on conductances. The inverse is entrywise
// nonnegative and every entry keeps full relative precision, however spread out t is.
struct ShiftedInverse {
  double log_det = 0;
  Eigen::MatrixXd inverse;
};
ShiftedInverse shifted_laplacian_inverse(const Eigen::MatrixXd& rho, const double* t, double edge_scale, double shift);

}  // namespace feyn
