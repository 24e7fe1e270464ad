#include "feyn/graph_polynomials.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "feyn/errors.hpp"
#include "gth.hpp"

namespace feyn {

VarList schwinger_vars(int num_edges) {
  std::vector<std::string> names;
  for (int e = 0; e < num_edges; ++e) names.push_back("t" + std::to_string(e + 1));
  return make_vars(names);
}

LaplacianData weighted_laplacian(const DecoratedGraph& g) {
  auto rho = incidence_matrix(g);
  const int m = g.num_edges(), n = g.num_vertices() - 1;
  LaplacianData lap;
  lap.vars = schwinger_vars(m);
  lap.edge_product = Polynomial::monomial(lap.vars, Exponents(m, 1), 1);
  lap.scaled.assign(n, std::vector<Polynomial>(n, Polynomial(lap.vars)));
  for (int e = 0; e < m; ++e) {
    Exponents others(m, 1);
    others[e] = 0;
    Polynomial drop = Polynomial::monomial(lap.vars, others, 1);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (rho[e][i] && rho[e][j]) lap.scaled[i][j] += drop * Rational(rho[e][i] * rho[e][j]);
  }
  lap.M.assign(n, std::vector<RationalFunction>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) lap.M[i][j] = RationalFunction(lap.scaled[i][j], lap.edge_product);
  lap.tree_polynomial = kirchhoff_polynomial(g);
  return lap;
}

Polynomial kirchhoff_polynomial(const DecoratedGraph& g) {
  const int m = g.num_edges();
  auto vars = schwinger_vars(m);
  Polynomial k(vars);
  for (auto& tree : spanning_trees(g)) {
    Exponents e(m, 0);
    for (int i = 0; i < m; ++i) e[i] = tree.contains(i) ? 0 : 1;
    k += Polynomial::monomial(vars, e, 1);
  }
  return k;
}

Polynomial bareiss_determinant(Matrix<Polynomial> a) {
  const int n = static_cast<int>(a.size());
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "empty matrix");
  for (auto& row : a)
    if (static_cast<int>(row.size()) != n) throw Error(ErrorKind::InvalidArgument, "matrix not square");
  VarList vars = a[0][0].vars();
  int sign = 1;
  Polynomial prev = Polynomial::constant(vars, 1);
  for (int k = 0; k < n - 1; ++k) {
    if (a[k][k].is_zero()) {
      int swap = -1;
      for (int r = k + 1; r < n && swap < 0; ++r)
        if (!a[r][k].is_zero()) swap = r;
      if (swap < 0) return Polynomial(vars);
      std::swap(a[k], a[swap]);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j)
        a[i][j] = (a[k][k] * a[i][j] - a[i][k] * a[k][j]).divide_exact(prev);
    prev = a[k][k];
  }
  Polynomial det = a[n - 1][n - 1];
  return sign < 0 ? -det : det;
}

RationalFunction laplacian_determinant(const LaplacianData& lap) {
  const int n = static_cast<int>(lap.scaled.size());
  Polynomial det = bareiss_determinant(lap.scaled);
  return RationalFunction(det, lap.edge_product.pow(n));
}

bool kirchhoff_identity_holds(const LaplacianData& lap) {
  RationalFunction det = laplacian_determinant(lap);
  return det * RationalFunction(lap.edge_product) == RationalFunction(lap.tree_polynomial);
}

namespace {

Polynomial cut_sum(const DecoratedGraph& g, const VarList& vars, const std::vector<int>& v1,
                   const std::vector<int>& v2) {
  Polynomial s(vars);
  for (int a : v1)
    for (int b : v2)
      if (a == b) return s;  // overlapping sets admit no separating forest
  const int m = g.num_edges();
  for (auto& c : cuts(g, v1, v2)) {
    Exponents e(m, 0);
    for (int i : c.indices()) e[i] = 1;
    s += Polynomial::monomial(vars, e, 1);
  }
  return s;
}

}  // namespace

bool inverse_identity_holds(const LaplacianData& lap, const InverseData& inv) {
  const int n = static_cast<int>(lap.scaled.size());
  Polynomial dk = lap.edge_product * inv.denominator;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Polynomial s(lap.vars);
      for (int k = 0; k < n; ++k) s += lap.scaled[i][k] * inv.numerators[k][j];
      if (i == j ? s != dk : !s.is_zero()) return false;
    }
  return true;
}

InverseData m_inverse(const DecoratedGraph& g, const LaplacianData& lap) {
  const int n = g.num_vertices() - 1;
  InverseData inv;
  inv.denominator = lap.tree_polynomial;
  inv.numerators.assign(n, std::vector<Polynomial>(n));
  inv.entries.assign(n, std::vector<RationalFunction>(n));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      inv.numerators[i][j] = cut_sum(g, lap.vars, {i + 1, j + 1}, {g.num_vertices()});
      inv.numerators[j][i] = inv.numerators[i][j];
    }
  if (!inverse_identity_holds(lap, inv)) throw Error(ErrorKind::Assertion, "M * M^-1 != Id");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inv.entries[i][j] = RationalFunction(inv.numerators[i][j], inv.denominator);
  return inv;
}

InverseData m_inverse(const DecoratedGraph& g) { return m_inverse(g, weighted_laplacian(g)); }

bool numerator_inclusion_holds(const DecoratedGraph& g, const DInverseData& d) {
  const int m = g.num_edges(), n = g.num_vertices() - 1;
  std::set<Exponents> tree_monomials;
  for (auto& [e, c] : d.denominator.terms()) {
    if (c != 1) return false;
    tree_monomials.insert(e);
  }
  for (int e = 0; e < m; ++e)
    for (int j = 0; j < n; ++j) {
      for (auto* p : {&d.cut_plus[e][j], &d.cut_minus[e][j]})
        for (auto& [ex, c] : p->terms())
          if (c != 1 || !tree_monomials.count(ex)) return false;
      for (auto& [ex, c] : d.reduced[e][j].terms())
        if (!tree_monomials.count(ex)) return false;
      if (d.reduced[e][j] != d.cut_plus[e][j] - d.cut_minus[e][j]) return false;
    }
  return true;
}

DInverseData d_inverse(const DecoratedGraph& g, const InverseData& inv) {
  auto rho = incidence_matrix(g);
  const int m = g.num_edges(), n = g.num_vertices() - 1;
  VarList vars = inv.denominator.vars();
  DInverseData d;
  d.denominator = inv.denominator;
  d.numerators.assign(m, std::vector<Polynomial>(n, Polynomial(vars)));
  d.reduced = d.cut_plus = d.cut_minus = d.numerators;
  d.entries.assign(m, std::vector<RationalFunction>(n));
  for (int e = 0; e < m; ++e) {
    Polynomial te = Polynomial::variable(vars, e);
    const int h = g.edge(e).head, t = g.edge(e).tail, ground = g.num_vertices();
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i)
        if (rho[e][i]) d.numerators[e][j] += inv.numerators[i][j] * Rational(rho[e][i]);
      d.reduced[e][j] = d.numerators[e][j].divide_exact(te);
      d.cut_plus[e][j] = cut_sum(g, vars, {j + 1, h}, {ground, t}).divide_exact(te);
      d.cut_minus[e][j] = cut_sum(g, vars, {j + 1, t}, {ground, h}).divide_exact(te);
      d.entries[e][j] = RationalFunction(d.reduced[e][j], d.denominator);
    }
  }
  if (!numerator_inclusion_holds(g, d)) throw Error(ErrorKind::Assertion, "d^-1 numerator inclusion fails");
  return d;
}

DInverseData d_inverse(const DecoratedGraph& g) { return d_inverse(g, m_inverse(g)); }

// ------------------------------------------------------------------ corners

VarList corner_vars(int num_edges, const EdgeSubset& sub) {
  std::vector<std::string> names;
  for (int e = 0; e < num_edges; ++e) names.push_back((sub.contains(e) ? "xi" : "t") + std::to_string(e + 1));
  return make_vars(names);
}

std::vector<CornerTerm> corner_expand(const Polynomial& p, const EdgeSubset& sub) {
  if (sub.empty()) throw Error(ErrorKind::EmptySubset, "corner_expand needs a nonempty subset");
  auto chain = corner_expand_chain(p, {sub});
  std::vector<CornerTerm> out;
  for (auto& [deg, poly] : chain) out.push_back({deg[0], poly});
  return out;
}

std::map<std::vector<int>, Polynomial> corner_expand_chain(const Polynomial& p, const std::vector<EdgeSubset>& chain) {
  if (chain.empty() || chain[0].empty()) throw Error(ErrorKind::EmptySubset, "corner chain needs a nonempty subset");
  const int m = p.num_vars();
  for (size_t i = 0; i < chain.size(); ++i) {
    if (chain[i].parent_size() != m) throw Error(ErrorKind::VariableMismatch, "chain subset over wrong edge count");
    if (i > 0 && ((chain[i].bits() & ~chain[i - 1].bits()) || chain[i] == chain[i - 1]))
      throw Error(ErrorKind::InvalidArgument, "chain must be strictly decreasing");
  }
  VarList target = corner_vars(m, chain[0]);
  std::map<std::vector<int>, Polynomial> out;
  for (auto& [e, c] : p.terms()) {
    std::vector<int> deg(chain.size(), 0);
    for (size_t i = 0; i < chain.size(); ++i)
      for (int k = 0; k < m; ++k)
        if (chain[i].contains(k)) deg[i] += e[k];
    auto it = out.find(deg);
    if (it == out.end()) it = out.emplace(deg, Polynomial(target)).first;
    it->second += Polynomial::monomial(target, e, c);
  }
  return out;
}

int min_rho_power_of_boundary(const DecoratedGraph& g, int d, int chain_length) {
  return d * g.num_vertices() - (d - 1) * g.num_edges() - chain_length * d - 1;
}

// ------------------------------------------------------------------ numeric

Eigen::MatrixXd incidence_eigen(const DecoratedGraph& g) {
  auto rho = incidence_matrix(g);
  Eigen::MatrixXd r(g.num_edges(), g.num_vertices() - 1);
  for (int e = 0; e < g.num_edges(); ++e)
    for (int i = 0; i < g.num_vertices() - 1; ++i) r(e, i) = rho[e][i];
  return r;
}

Eigen::MatrixXd laplacian_numeric(const Eigen::MatrixXd& rho, const Eigen::VectorXd& t) {
  return rho.transpose() * t.cwiseInverse().asDiagonal() * rho;
}

Eigen::MatrixXd d_inverse_numeric(const Eigen::MatrixXd& rho, const Eigen::VectorXd& t) {
  Eigen::MatrixXd minv = shifted_laplacian_inverse(rho, t.data(), 1.0, 0.0).inverse;
  return t.cwiseInverse().asDiagonal() * rho * minv;
}

ShiftedInverse shifted_laplacian_inverse(const Eigen::MatrixXd& rho, const double* t, double edge_scale, double shift) {
  const int m = static_cast<int>(rho.rows()), n = static_cast<int>(rho.cols());
  std::vector<std::vector<double>> rows(m, std::vector<double>(n));
  for (int e = 0; e < m; ++e)
    for (int i = 0; i < n; ++i) rows[e][i] = rho(e, i);
  auto r = detail::gth_inverse<double>(detail::edge_ends(rows), n, t, edge_scale, shift);
  ShiftedInverse out;
  out.log_det = r.log_det;
  out.inverse = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(r.inverse.data(), n, n);
  return out;
}

}  // namespace feyn
