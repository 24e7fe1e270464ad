#pragma once

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace feyn {

using Rational = mpq_class;
using VarList = std::shared_ptr<const std::vector<std::string>>;
using Exponents = std::vector<int>;

VarList make_vars(std::vector<std::string> names);
bool same_vars(const VarList& a, const VarList& b);

// Sparse multivariate polynomial with exact rational coefficients.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(VarList vars);
  static Polynomial constant(VarList vars, const Rational& c);
  static Polynomial variable(VarList vars, int index);
  static Polynomial variable(VarList vars, const std::string& name);
  static Polynomial monomial(VarList vars, const Exponents& exps, const Rational& c);

  const VarList& vars() const { return vars_; }
  int num_vars() const { return vars_ ? static_cast<int>(vars_->size()) : 0; }
  int var_index(const std::string& name) const;
  const std::map<Exponents, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  size_t size() const { return terms_.size(); }
  int total_degree() const;  // -1 for zero
  int degree_in(int var) const;
  int min_degree_in(int var) const;
  Rational coefficient(const Exponents& e) const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator-() const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(const Rational& c) const;
  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  bool operator==(const Polynomial& o) const;
  bool operator!=(const Polynomial& o) const { return !(*this == o); }

  Polynomial pow(unsigned k) const;
  Polynomial partial_derivative(int var) const;
  // Replace variables by polynomials over `target` vars; unmapped variables must
  // exist by name in `target`.
  Polynomial substitute(const std::map<int, Polynomial>& images, const VarList& target) const;
  // Same polynomial re-expressed over a variable list containing all used names.
  Polynomial rebased(const VarList& target) const;
  // Exact division; throws Assertion when the divisor does not divide.
  Polynomial divide_exact(const Polynomial& divisor) const;
  bool divides(const Polynomial& numerator, Polynomial* quotient = nullptr) const;

  double evaluate(const std::vector<double>& x) const;
  std::complex<double> evaluate(const std::vector<std::complex<double>>& x) const;

  // Canonical sorted text: higher total degree first, then lexicographically
  // larger exponent vectors first.
  std::string to_string() const;

 private:
  void check(const Polynomial& o) const;
  void add_term(const Exponents& e, const Rational& c);
  VarList vars_;
  std::map<Exponents, Rational> terms_;
};

std::string rational_string(const Rational& q);

// numerator / denominator; equality by cross-multiplication.
class RationalFunction {
 public:
  RationalFunction() = default;
  explicit RationalFunction(Polynomial num);
  RationalFunction(Polynomial num, Polynomial den);

  const Polynomial& num() const { return num_; }
  const Polynomial& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }

  RationalFunction operator+(const RationalFunction& o) const;
  RationalFunction operator-(const RationalFunction& o) const;
  RationalFunction operator-() const;
  RationalFunction operator*(const RationalFunction& o) const;
  RationalFunction operator/(const RationalFunction& o) const;
  bool operator==(const RationalFunction& o) const;
  bool operator!=(const RationalFunction& o) const { return !(*this == o); }

  double evaluate(const std::vector<double>& x) const;
  std::string to_string() const;

 private:
  void reduce();
  Polynomial num_, den_;
};

// Element of the exterior algebra on `num_generators` ordered generators with
// polynomial coefficients. Monomials are bitmasks; generator i precedes j when i<j.
class ExteriorElement {
 public:
  ExteriorElement() = default;
  ExteriorElement(int num_generators, VarList coeff_vars);
  static ExteriorElement scalar(int num_generators, const Polynomial& c);
  static ExteriorElement generator(int num_generators, int index, const Polynomial& c);

  int num_generators() const { return ngen_; }
  const VarList& coeff_vars() const { return vars_; }
  const std::map<std::uint64_t, Polynomial>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  ExteriorElement operator+(const ExteriorElement& o) const;
  ExteriorElement operator-(const ExteriorElement& o) const;
  ExteriorElement operator*(const Polynomial& c) const;
  ExteriorElement wedge(const ExteriorElement& o) const;
  bool operator==(const ExteriorElement& o) const { return (*this - o).is_zero(); }

  Polynomial extract_component(std::uint64_t generators) const;
  // Keep only monomials whose generators restricted to `mask` equal `pattern`.
  ExteriorElement filtered(std::uint64_t mask, std::uint64_t pattern) const;
  std::string to_string(const std::vector<std::string>& generator_names) const;

 private:
  void check(const ExteriorElement& o) const;
  int ngen_ = 0;
  VarList vars_;
  std::map<std::uint64_t, Polynomial> terms_;
};

// Sign of moving the generators of `b` behind those of `a` into sorted order.
int koszul_sign(std::uint64_t a, std::uint64_t b);

}  // namespace feyn
