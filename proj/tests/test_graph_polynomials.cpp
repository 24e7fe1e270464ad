#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "corpus.hpp"
#include "feyn/errors.hpp"
#include "feyn/graph_polynomials.hpp"

using namespace feyn;

namespace {

Polynomial t(const VarList& v, int e) { return Polynomial::variable(v, e); }

std::vector<double> random_t(int m, std::mt19937& rng, double lo_exp = -2, double hi_exp = 2) {
  std::uniform_real_distribution<double> u(lo_exp, hi_exp);
  std::vector<double> x(m);
  for (auto& v : x) v = std::pow(10.0, u(rng));
  return x;
}

}  // namespace

TEST_CASE("Kirchhoff polynomial of the anchor graphs") {
  auto v1 = schwinger_vars(1), v2 = schwinger_vars(2), v3 = schwinger_vars(3);
  CHECK(kirchhoff_polynomial(corpus::single_edge(1)) == Polynomial::constant(v1, 1));
  CHECK(kirchhoff_polynomial(corpus::bigon(1)) == t(v2, 0) + t(v2, 1));
  CHECK(kirchhoff_polynomial(corpus::triangle(1)) == t(v3, 0) + t(v3, 1) + t(v3, 2));
}

TEST_CASE("Kirchhoff polynomial at t = 1 counts spanning trees") {
  for (auto& g : corpus::full(1)) {
    auto K = kirchhoff_polynomial(g);
    CHECK(K.evaluate(std::vector<double>(g.num_edges(), 1.0)) == doctest::Approx(spanning_trees(g).size()));
    // homogeneous of degree b1
    for (auto& [e, c] : K.terms()) {
      int deg = 0;
      for (int x : e) deg += x;
      CHECK(deg == first_betti(g));
    }
  }
}

TEST_CASE("Bareiss determinant") {
  auto v = make_vars({"a", "b"});
  auto a = Polynomial::variable(v, 0), b = Polynomial::variable(v, 1);
  auto c = [&](int k) { return Polynomial::constant(v, k); };
  CHECK(bareiss_determinant({{c(2), c(1)}, {c(1), c(3)}}) == c(5));
  CHECK(bareiss_determinant({{a, b}, {b, a}}) == a * a - b * b);
  CHECK(bareiss_determinant({{c(0), c(1)}, {c(1), c(0)}}) == c(-1));  // needs a row swap
  CHECK(bareiss_determinant({{c(1), c(2), c(3)}, {c(4), c(5), c(6)}, {c(7), c(8), c(9)}}).is_zero());
  CHECK_THROWS_AS(bareiss_determinant({{c(1), c(2)}}), Error);
}

TEST_CASE("Laplacian, inverse and d-inverse identities hold on the corpus") {
  for (auto& g : corpus::exhaustive(1)) {
    auto lap = weighted_laplacian(g);
    CHECK(kirchhoff_identity_holds(lap));
    auto inv = m_inverse(g, lap);
    CHECK(inverse_identity_holds(lap, inv));
    CHECK(inv.denominator == lap.tree_polynomial);
    auto dinv = d_inverse(g, inv);
    CHECK(numerator_inclusion_holds(g, dinv));
  }
}

TEST_CASE("single edge: M = 1/t, M^-1 = t") {
  auto g = corpus::single_edge(1);
  auto lap = weighted_laplacian(g);
  auto v = lap.vars;
  CHECK(lap.M[0][0] == RationalFunction(Polynomial::constant(v, 1), t(v, 0)));
  auto inv = m_inverse(g, lap);
  CHECK(inv.entries[0][0] == RationalFunction(t(v, 0)));
  // d^-1 = t^-1 rho M^-1 = rho
  auto dinv = d_inverse(g, inv);
  auto rho = incidence_matrix(g);
  CHECK(dinv.entries[0][0] == RationalFunction(Polynomial::constant(v, rho[0][0])));
}

TEST_CASE("numeric d-inverse is a bounded left inverse of rho") {
  std::mt19937 rng(3);
  for (auto& g : corpus::random_graphs(60, 1, 99)) {
    auto rho = incidence_eigen(g);
    auto tv = random_t(g.num_edges(), rng);
    Eigen::VectorXd tt = Eigen::Map<Eigen::VectorXd>(tv.data(), tv.size());
    Eigen::MatrixXd D = d_inverse_numeric(rho, tt);
    // d^-1 is a left inverse of rho
    CHECK((rho.transpose() * D - Eigen::MatrixXd::Identity(rho.cols(), rho.cols())).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(D.cwiseAbs().maxCoeff() <= 1 + 1e-12);
  }
}

TEST_CASE("shifted inverse agrees with dense LU") {
  std::mt19937 rng(8);
  for (auto& g : corpus::random_graphs(60, 1, 5)) {
    auto rho = incidence_eigen(g);
    auto tv = random_t(g.num_edges(), rng, -1, 1);
    for (double shift : {0.0, 0.3}) {
      Eigen::VectorXd scaled(tv.size());
      for (size_t e = 0; e < tv.size(); ++e) scaled[e] = tv[e] / 0.5;
      Eigen::MatrixXd A = laplacian_numeric(rho, scaled) +
                          shift * Eigen::MatrixXd::Identity(rho.cols(), rho.cols());
      auto r = shifted_laplacian_inverse(rho, tv.data(), 0.5, shift);
      Eigen::MatrixXd ref = A.inverse();
      CHECK((r.inverse - ref).cwiseAbs().maxCoeff() < 1e-9 * ref.cwiseAbs().maxCoeff());
      CHECK(r.log_det == doctest::Approx(std::log(A.determinant())).epsilon(1e-10));
      CHECK(r.inverse.minCoeff() >= 0);
    }
  }
}

TEST_CASE("shifted inverse keeps relative precision under extreme spread") {
  // path 1 - 2 - ground with conductances 1e12 and 1: M^-1 = [[1 + 1e-12, 1], [1, 1]]
  auto g = parse_graph("dim 1\nvertices 3\nedge 1 2\nedge 2 3\n");
  auto rho = incidence_eigen(g);
  double tv[] = {1e-12, 1.0};
  auto r = shifted_laplacian_inverse(rho, tv, 1.0, 0.0);
  CHECK(r.inverse(0, 0) - 1.0 == doctest::Approx(1e-12).epsilon(1e-3));
  CHECK(r.inverse(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("corner expansion reassembles the polynomial") {
  std::mt19937 rng(21);
  for (auto& g : corpus::random_graphs(25, 1, 31)) {
    const int m = g.num_edges();
    auto K = kirchhoff_polynomial(g);
    for (std::uint64_t bits = 1; bits < (std::uint64_t{1} << m); bits += 1 + bits / 3) {
      EdgeSubset sub(m, bits);
      auto terms = corner_expand(K, sub);
      auto x = random_t(m, rng, -0.5, 0.5);
      const double rho = 0.37;
      std::vector<double> tt(x);
      for (int e : sub.indices()) tt[e] = rho * x[e];
      double sum = 0;
      for (auto& term : terms) sum += std::pow(rho, term.rho_degree) * term.coefficient.evaluate(x);
      CHECK(sum == doctest::Approx(K.evaluate(tt)).epsilon(1e-10));
      // lowest power of the collapsing parameter is the loop number of the subset
      int lowest = terms.front().rho_degree;
      for (auto& term : terms) lowest = std::min(lowest, term.rho_degree);
      CHECK(lowest == first_betti(g, sub));
    }
  }
}

TEST_CASE("corner chains") {
  auto g = corpus::triangle(1);
  auto K = kirchhoff_polynomial(g);
  auto chain = corner_expand_chain(K, {EdgeSubset::full(3), EdgeSubset::of(3, {0})});
  auto v = corner_vars(3, EdgeSubset::full(3));
  // t1 = r1 r2 xi1, t2 = r1 xi2, t3 = r1 xi3
  REQUIRE(chain.size() == 2);
  CHECK(chain.at({1, 1}) == Polynomial::variable(v, 0));
  CHECK(chain.at({1, 0}) == Polynomial::variable(v, 1) + Polynomial::variable(v, 2));
  CHECK_THROWS_AS(corner_expand_chain(K, {EdgeSubset::of(3, {0}), EdgeSubset::full(3)}), Error);
  CHECK_THROWS_AS(corner_expand(K, EdgeSubset(3, 0)), Error);
}
