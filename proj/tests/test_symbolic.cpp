#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <bit>
#include <random>

#include "feyn/errors.hpp"
#include "feyn/symbolic.hpp"

using namespace feyn;

namespace {

VarList xyz() { return make_vars({"x", "y", "z"}); }

Polynomial random_poly(const VarList& v, std::mt19937& rng, int terms = 4, int maxdeg = 3) {
  std::uniform_int_distribution<int> deg(0, maxdeg), coef(-5, 5);
  Polynomial p(v);
  for (int i = 0; i < terms; ++i) {
    Exponents e(v->size());
    for (auto& x : e) x = deg(rng);
    p += Polynomial::monomial(v, e, Rational(coef(rng), 1 + deg(rng)));
  }
  return p;
}

// random form of pure degree `deg` on `ngen` generators
ExteriorElement random_form(int ngen, int deg, const VarList& v, std::mt19937& rng) {
  ExteriorElement f(ngen, v);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << ngen); ++mask) {
    if (std::popcount(mask) != deg || rng() % 2) continue;
    ExteriorElement mono = ExteriorElement::scalar(ngen, random_poly(v, rng, 2, 2));
    for (int g = 0; g < ngen; ++g)
      if ((mask >> g) & 1) mono = mono.wedge(ExteriorElement::generator(ngen, g, Polynomial::constant(v, 1)));
    f = f + mono;
  }
  return f;
}

}  // namespace

TEST_CASE("polynomial ring arithmetic") {
  auto v = xyz();
  auto x = Polynomial::variable(v, "x"), y = Polynomial::variable(v, "y");
  auto sq = (x + y).pow(2);
  CHECK(sq == x * x + x * y * Rational(2) + y * y);
  CHECK(sq.total_degree() == 2);
  CHECK(Polynomial(v).total_degree() == -1);
  CHECK((x - x).is_zero());
  CHECK(sq.coefficient({1, 1, 0}) == Rational(2));
  CHECK(sq.degree_in(0) == 2);
  CHECK(sq.min_degree_in(0) == 0);
  CHECK(Polynomial::constant(v, 3).is_constant());
}

TEST_CASE("ring axioms hold on random polynomials") {
  std::mt19937 rng(5);
  auto v = xyz();
  for (int i = 0; i < 50; ++i) {
    auto a = random_poly(v, rng), b = random_poly(v, rng), c = random_poly(v, rng);
    CHECK((a + b) * c == a * c + b * c);
    CHECK(a * b == b * a);
    CHECK((a * b) * c == a * (b * c));
    CHECK(a - a == Polynomial(v));
    // Leibniz rule
    CHECK((a * b).partial_derivative(1) == a.partial_derivative(1) * b + a * b.partial_derivative(1));
    if (!b.is_zero()) CHECK((a * b).divide_exact(b) == a);
  }
}

TEST_CASE("exact division, substitution and rebasing") {
  auto v = xyz();
  auto x = Polynomial::variable(v, 0), y = Polynomial::variable(v, 1);
  auto one = Polynomial::constant(v, 1);
  CHECK((x * x - one).divide_exact(x - one) == x + one);
  CHECK_THROWS_AS((x * x + one).divide_exact(x - one), Error);
  Polynomial q;
  CHECK((x - one).divides(x * x - one, &q));
  CHECK(q == x + one);
  CHECK_FALSE((x - y).divides(x + y));

  auto w = make_vars({"y", "x", "z", "u"});
  auto moved = (x * y * Rational(3)).rebased(w);
  CHECK(moved == Polynomial::variable(w, "x") * Polynomial::variable(w, "y") * Rational(3));

  // x -> y + 1 in (x^2)
  auto img = Polynomial::variable(v, 1) + one;
  CHECK((x * x).substitute({{0, img}}, v) == img * img);
}

TEST_CASE("polynomial evaluation") {
  auto v = xyz();
  auto p = Polynomial::variable(v, 0) * Polynomial::variable(v, 1) + Polynomial::constant(v, Rational(1, 2));
  CHECK(p.evaluate(std::vector<double>{2, 3, 0}) == doctest::Approx(6.5));
  auto c = p.evaluate(std::vector<std::complex<double>>{{0, 1}, {0, 1}, 0});
  CHECK(c.real() == doctest::Approx(-0.5));
  CHECK(c.imag() == doctest::Approx(0));
}

TEST_CASE("canonical text order") {
  auto v = xyz();
  auto x = Polynomial::variable(v, 0), y = Polynomial::variable(v, 1), z = Polynomial::variable(v, 2);
  auto one = Polynomial::constant(v, 1);
  CHECK((z + y * y + x + one).to_string() == "y^2 + x + z + 1");
  CHECK((x * Rational(-1, 2)).to_string() == "-1/2*x");
  CHECK(Polynomial(v).to_string() == "0");
  // order does not depend on construction history
  CHECK((one + x + z + y * y).to_string() == (y * y + z + one + x).to_string());
}

TEST_CASE("rational functions compare by cross-multiplication") {
  auto v = xyz();
  auto x = Polynomial::variable(v, 0), y = Polynomial::variable(v, 1);
  auto one = Polynomial::constant(v, 1);
  RationalFunction f(x * x - one, x - one), g(x + one);
  CHECK(f == g);
  RationalFunction a(one, x), b(one, y);
  CHECK(a + b == RationalFunction(x + y, x * y));
  CHECK(a * b == RationalFunction(one, x * y));
  CHECK(a / b == RationalFunction(y, x));
  CHECK((a - a).is_zero());
  CHECK(RationalFunction(x + y, x * y).evaluate({2, 4, 0}) == doctest::Approx(0.75));
  CHECK(RationalFunction(x + y, x * y).to_string() == "(x + y)/(x*y)");
}

TEST_CASE("exterior algebra basics") {
  auto v = xyz();
  auto one = Polynomial::constant(v, 1);
  auto e0 = ExteriorElement::generator(3, 0, one), e1 = ExteriorElement::generator(3, 1, one);
  CHECK(e0.wedge(e0).is_zero());
  CHECK((e0.wedge(e1) + e1.wedge(e0)).is_zero());
  CHECK(e0.wedge(e1).extract_component(0b011) == one);
  CHECK(e1.wedge(e0).extract_component(0b011) == -one);
  CHECK(e0.wedge(e1).to_string({"a", "b", "c"}).find("a") != std::string::npos);
  CHECK_THROWS_AS(e0 + ExteriorElement::generator(4, 0, one), Error);
}

TEST_CASE("koszul sign matches the wedge product of monomials") {
  auto v = make_vars({"x"});
  auto one = Polynomial::constant(v, 1);
  const int n = 6;
  auto mono = [&](std::uint64_t mask) {
    ExteriorElement f = ExteriorElement::scalar(n, one);
    for (int g = 0; g < n; ++g)
      if ((mask >> g) & 1) f = f.wedge(ExteriorElement::generator(n, g, one));
    return f;
  };
  for (std::uint64_t a = 0; a < 64; ++a)
    for (std::uint64_t b = 0; b < 64; ++b) {
      if (a & b) continue;
      auto w = mono(a).wedge(mono(b));
      CHECK(w.extract_component(a | b) == one * Rational(koszul_sign(a, b)));
    }
}

TEST_CASE("wedge is associative and graded-commutative") {
  std::mt19937 rng(17);
  auto v = make_vars({"x", "y"});
  for (int i = 0; i < 30; ++i) {
    int p = rng() % 3, q = rng() % 3, r = rng() % 2;
    auto a = random_form(5, p, v, rng), b = random_form(5, q, v, rng), c = random_form(5, r, v, rng);
    CHECK(a.wedge(b).wedge(c) == a.wedge(b.wedge(c)));
    auto ba = b.wedge(a);
    CHECK(a.wedge(b) == ((p * q) % 2 ? ba * Polynomial::constant(v, -1) : ba));
    CHECK(a.wedge(b + c) == a.wedge(b) + a.wedge(c));
  }
}

TEST_CASE("filtering keeps matching generator patterns") {
  auto v = make_vars({"x"});
  auto one = Polynomial::constant(v, 1);
  auto f = ExteriorElement::generator(3, 0, one) + ExteriorElement::generator(3, 1, one) +
           ExteriorElement::generator(3, 0, one).wedge(ExteriorElement::generator(3, 2, one));
  auto kept = f.filtered(0b001, 0b001);
  CHECK(kept.terms().size() == 2);
  CHECK(f.filtered(0b001, 0).terms().size() == 1);
}
