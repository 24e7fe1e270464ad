#include <algorithm>
#include <cmath>
#include <sstream>

#include "feyn/errors.hpp"
#include "feyn/symbolic.hpp"

namespace feyn {

VarList make_vars(std::vector<std::string> names) {
  return std::make_shared<const std::vector<std::string>>(std::move(names));
}

bool same_vars(const VarList& a, const VarList& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

std::string rational_string(const Rational& q) {
  mpq_class c = q;
  c.canonicalize();
  return c.get_str();
}

// ---------------------------------------------------------------- Polynomial

Polynomial::Polynomial(VarList vars) : vars_(std::move(vars)) {}

Polynomial Polynomial::constant(VarList vars, const Rational& c) {
  Polynomial p(vars);
  p.add_term(Exponents(p.num_vars(), 0), c);
  return p;
}

Polynomial Polynomial::variable(VarList vars, int index) {
  Polynomial p(vars);
  if (index < 0 || index >= p.num_vars()) throw Error(ErrorKind::VariableMismatch, "variable index out of range");
  Exponents e(p.num_vars(), 0);
  e[index] = 1;
  p.add_term(e, 1);
  return p;
}

Polynomial Polynomial::variable(VarList vars, const std::string& name) {
  Polynomial p(vars);
  return variable(vars, p.var_index(name));
}

Polynomial Polynomial::monomial(VarList vars, const Exponents& exps, const Rational& c) {
  Polynomial p(vars);
  if (static_cast<int>(exps.size()) != p.num_vars()) throw Error(ErrorKind::VariableMismatch, "exponent length");
  p.add_term(exps, c);
  return p;
}

int Polynomial::var_index(const std::string& name) const {
  if (!vars_) throw Error(ErrorKind::VariableMismatch, "polynomial has no variable list");
  auto it = std::find(vars_->begin(), vars_->end(), name);
  if (it == vars_->end()) throw Error(ErrorKind::VariableMismatch, "unknown variable " + name);
  return static_cast<int>(it - vars_->begin());
}

bool Polynomial::is_constant() const {
  if (terms_.empty()) return true;
  if (terms_.size() > 1) return false;
  const auto& e = terms_.begin()->first;
  return std::all_of(e.begin(), e.end(), [](int x) { return x == 0; });
}

int Polynomial::total_degree() const {
  int best = -1;
  for (auto& [e, c] : terms_) {
    int s = 0;
    for (int x : e) s += x;
    best = std::max(best, s);
  }
  return best;
}

int Polynomial::degree_in(int var) const {
  int best = -1;
  for (auto& [e, c] : terms_) best = std::max(best, e[var]);
  return best;
}

int Polynomial::min_degree_in(int var) const {
  int best = -1;
  for (auto& [e, c] : terms_) best = best < 0 ? e[var] : std::min(best, e[var]);
  return best;
}

Rational Polynomial::coefficient(const Exponents& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? Rational(0) : it->second;
}

void Polynomial::check(const Polynomial& o) const {
  if (!same_vars(vars_, o.vars_)) throw Error(ErrorKind::VariableMismatch, "polynomials over different variables");
}

void Polynomial::add_term(const Exponents& e, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.emplace(e, c);
  if (inserted) {
    it->second.canonicalize();  // callers may pass unreduced fractions such as 4/2
  } else {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  check(o);
  for (auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  check(o);
  for (auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  Polynomial r = *this;
  r += o;
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
  Polynomial r = *this;
  r -= o;
  return r;
}

Polynomial Polynomial::operator-() const {
  Polynomial r(vars_);
  for (auto& [e, c] : terms_) r.terms_.emplace(e, -c);
  return r;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  check(o);
  Polynomial r(vars_);
  const int n = num_vars();
  Exponents buf(n);
  for (auto& [ea, ca] : terms_)
    for (auto& [eb, cb] : o.terms_) {
      for (int i = 0; i < n; ++i) buf[i] = ea[i] + eb[i];
      r.add_term(buf, ca * cb);
    }
  return r;
}

Polynomial Polynomial::operator*(const Rational& c) const {
  Polynomial r(vars_);
  if (c == 0) return r;
  Rational k = c;
  k.canonicalize();
  for (auto& [e, x] : terms_) r.terms_.emplace(e, x * k);
  return r;
}

bool Polynomial::operator==(const Polynomial& o) const {
  check(o);
  return terms_ == o.terms_;
}

Polynomial Polynomial::pow(unsigned k) const {
  Polynomial result = constant(vars_, 1), base = *this;
  while (k) {
    if (k & 1u) result = result * base;
    k >>= 1u;
    if (k) base = base * base;
  }
  return result;
}

Polynomial Polynomial::partial_derivative(int var) const {
  if (var < 0 || var >= num_vars()) throw Error(ErrorKind::VariableMismatch, "variable index out of range");
  Polynomial r(vars_);
  for (auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    Exponents f = e;
    f[var] -= 1;
    r.add_term(f, c * e[var]);
  }
  return r;
}

Polynomial Polynomial::rebased(const VarList& target) const {
  Polynomial probe(target);
  std::vector<int> map(num_vars());
  for (int i = 0; i < num_vars(); ++i) {
    bool used = std::any_of(terms_.begin(), terms_.end(), [&](auto& t) { return t.first[i] != 0; });
    auto it = std::find(target->begin(), target->end(), (*vars_)[i]);
    if (it == target->end()) {
      if (used) throw Error(ErrorKind::VariableMismatch, "variable " + (*vars_)[i] + " missing in target");
      map[i] = -1;
    } else {
      map[i] = static_cast<int>(it - target->begin());
    }
  }
  Polynomial r(target);
  Exponents buf(r.num_vars());
  for (auto& [e, c] : terms_) {
    std::fill(buf.begin(), buf.end(), 0);
    for (int i = 0; i < num_vars(); ++i)
      if (map[i] >= 0) buf[map[i]] += e[i];
    r.add_term(buf, c);
  }
  return r;
}

Polynomial Polynomial::substitute(const std::map<int, Polynomial>& images, const VarList& target) const {
  for (auto& [i, p] : images) {
    if (i < 0 || i >= num_vars()) throw Error(ErrorKind::VariableMismatch, "substituted variable out of range");
    if (!same_vars(p.vars(), target)) throw Error(ErrorKind::VariableMismatch, "image over wrong variables");
  }
  // identity images for unmapped variables
  std::vector<Polynomial> img(num_vars());
  for (int i = 0; i < num_vars(); ++i) {
    auto it = images.find(i);
    if (it != images.end()) {
      img[i] = it->second;
    } else {
      bool used = std::any_of(terms_.begin(), terms_.end(), [&](auto& t) { return t.first[i] != 0; });
      if (used) img[i] = Polynomial::variable(target, (*vars_)[i]);
    }
  }
  std::vector<std::vector<Polynomial>> powers(num_vars());
  auto power = [&](int i, int k) -> const Polynomial& {
    auto& cache = powers[i];
    if (cache.empty()) cache.push_back(constant(target, 1));
    while (static_cast<int>(cache.size()) <= k) cache.push_back(cache.back() * img[i]);
    return cache[k];
  };
  Polynomial r(target);
  for (auto& [e, c] : terms_) {
    Polynomial t = constant(target, c);
    for (int i = 0; i < num_vars(); ++i)
      if (e[i]) t = t * power(i, e[i]);
    r += t;
  }
  return r;
}

bool Polynomial::divides(const Polynomial& numerator, Polynomial* quotient) const {
  check(numerator);
  if (is_zero()) throw Error(ErrorKind::InvalidArgument, "division by zero polynomial");
  const int n = num_vars();
  Polynomial rem = numerator, q(vars_);
  const auto& [lead_e, lead_c] = *terms_.rbegin();
  Exponents buf(n);
  while (!rem.is_zero()) {
    const auto& [re, rc] = *rem.terms_.rbegin();
    for (int i = 0; i < n; ++i) {
      buf[i] = re[i] - lead_e[i];
      if (buf[i] < 0) return false;
    }
    Rational c = rc / lead_c;
    Exponents qe = buf;
    q.add_term(qe, c);
    for (auto& [e, x] : terms_) {
      for (int i = 0; i < n; ++i) buf[i] = e[i] + qe[i];
      rem.add_term(buf, -x * c);
    }
  }
  if (quotient) *quotient = std::move(q);
  return true;
}

Polynomial Polynomial::divide_exact(const Polynomial& divisor) const {
  Polynomial q;
  if (!divisor.divides(*this, &q)) throw Error(ErrorKind::Assertion, "inexact polynomial division");
  return q;
}

double Polynomial::evaluate(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != num_vars()) throw Error(ErrorKind::VariableMismatch, "evaluation point size");
  double s = 0;
  for (auto& [e, c] : terms_) {
    double t = c.get_d();
    for (int i = 0; i < num_vars(); ++i)
      if (e[i]) t *= std::pow(x[i], e[i]);
    s += t;
  }
  return s;
}

std::complex<double> Polynomial::evaluate(const std::vector<std::complex<double>>& x) const {
  if (static_cast<int>(x.size()) != num_vars()) throw Error(ErrorKind::VariableMismatch, "evaluation point size");
  std::complex<double> s = 0;
  for (auto& [e, c] : terms_) {
    std::complex<double> t = c.get_d();
    for (int i = 0; i < num_vars(); ++i)
      for (int k = 0; k < e[i]; ++k) t *= x[i];
    s += t;
  }
  return s;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::vector<std::pair<const Exponents*, const Rational*>> order;
  for (auto& [e, c] : terms_) order.emplace_back(&e, &c);
  auto deg = [](const Exponents& e) {
    int s = 0;
    for (int x : e) s += x;
    return s;
  };
  std::sort(order.begin(), order.end(), [&](auto& a, auto& b) {
    int da = deg(*a.first), db = deg(*b.first);
    if (da != db) return da > db;
    return *a.first > *b.first;
  });
  std::ostringstream o;
  bool first = true;
  for (auto& [ep, cp] : order) {
    const Exponents& e = *ep;
    Rational c = *cp;
    bool neg = c < 0;
    if (neg) c = -c;
    std::string mono;
    for (int i = 0; i < num_vars(); ++i) {
      if (!e[i]) continue;
      if (!mono.empty()) mono += "*";
      mono += (*vars_)[i];
      if (e[i] > 1) mono += "^" + std::to_string(e[i]);
    }
    std::string body;
    if (mono.empty()) body = rational_string(c);
    else if (c == 1) body = mono;
    else body = rational_string(c) + "*" + mono;
    if (first) o << (neg ? "-" : "") << body;
    else o << (neg ? " - " : " + ") << body;
    first = false;
  }
  return o.str();
}

// --------------------------------------------------------- RationalFunction

RationalFunction::RationalFunction(Polynomial num) : num_(std::move(num)) {
  den_ = Polynomial::constant(num_.vars(), 1);
}

RationalFunction::RationalFunction(Polynomial num, Polynomial den) : num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) throw Error(ErrorKind::InvalidArgument, "zero denominator");
  if (!same_vars(num_.vars(), den_.vars())) throw Error(ErrorKind::VariableMismatch, "num/den variables differ");
  reduce();
}

void RationalFunction::reduce() {
  if (num_.is_zero()) {
    den_ = Polynomial::constant(num_.vars(), 1);
    return;
  }
  const int n = num_.num_vars();
  // cancel the common monomial factor
  Exponents common(n, 1 << 30);
  for (auto* p : {&num_, &den_})
    for (auto& [e, c] : p->terms())
      for (int i = 0; i < n; ++i) common[i] = std::min(common[i], e[i]);
  if (std::any_of(common.begin(), common.end(), [](int x) { return x > 0; })) {
    Polynomial m = Polynomial::monomial(num_.vars(), common, 1);
    num_ = num_.divide_exact(m);
    den_ = den_.divide_exact(m);
  }
  if (!den_.is_constant()) {
    Polynomial q;
    if (den_.divides(num_, &q)) {
      num_ = q;
      den_ = Polynomial::constant(num_.vars(), 1);
    } else if (!num_.is_constant() && num_.divides(den_, &q)) {
      den_ = q;
      num_ = Polynomial::constant(num_.vars(), 1);
    }
  }
  Rational lead = den_.terms().rbegin()->second;
  if (lead != 1) {
    Rational inv = 1 / lead;
    num_ = num_ * inv;
    den_ = den_ * inv;
  }
}

RationalFunction RationalFunction::operator+(const RationalFunction& o) const {
  if (den_ == o.den_) return RationalFunction(num_ + o.num_, den_);
  return RationalFunction(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}

RationalFunction RationalFunction::operator-(const RationalFunction& o) const { return *this + (-o); }

RationalFunction RationalFunction::operator-() const {
  RationalFunction r = *this;
  r.num_ = -r.num_;
  return r;
}

RationalFunction RationalFunction::operator*(const RationalFunction& o) const {
  return RationalFunction(num_ * o.num_, den_ * o.den_);
}

RationalFunction RationalFunction::operator/(const RationalFunction& o) const {
  if (o.is_zero()) throw Error(ErrorKind::InvalidArgument, "division by zero rational function");
  return RationalFunction(num_ * o.den_, den_ * o.num_);
}

bool RationalFunction::operator==(const RationalFunction& o) const { return num_ * o.den_ == o.num_ * den_; }

double RationalFunction::evaluate(const std::vector<double>& x) const { return num_.evaluate(x) / den_.evaluate(x); }

std::string RationalFunction::to_string() const {
  if (den_.is_constant() && den_.coefficient(Exponents(den_.num_vars(), 0)) == 1) return num_.to_string();
  auto wrap = [](const Polynomial& p) {
    std::string s = p.to_string();
    bool atomic = s.find_first_of(" */") == std::string::npos;
    return atomic ? s : "(" + s + ")";
  };
  return wrap(num_) + "/" + wrap(den_);
}

}  // namespace feyn
