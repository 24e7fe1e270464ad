#include <bit>
#include <sstream>

#include "feyn/errors.hpp"
#include "feyn/symbolic.hpp"

namespace feyn {

int koszul_sign(std::uint64_t a, std::uint64_t b) {
  int swaps = 0;
  for (std::uint64_t rest = b; rest; rest &= rest - 1) {
    int y = std::countr_zero(rest);
    std::uint64_t above = y >= 63 ? 0 : (a >> (y + 1));
    swaps += std::popcount(above);
  }
  return swaps % 2 ? -1 : 1;
}

ExteriorElement::ExteriorElement(int num_generators, VarList coeff_vars)
    : ngen_(num_generators), vars_(std::move(coeff_vars)) {
  if (ngen_ < 0 || ngen_ > 64) throw Error(ErrorKind::GeneratorMismatch, "generator count out of range");
}

ExteriorElement ExteriorElement::scalar(int num_generators, const Polynomial& c) {
  ExteriorElement r(num_generators, c.vars());
  if (!c.is_zero()) r.terms_.emplace(0, c);
  return r;
}

ExteriorElement ExteriorElement::generator(int num_generators, int index, const Polynomial& c) {
  ExteriorElement r(num_generators, c.vars());
  if (index < 0 || index >= num_generators) throw Error(ErrorKind::GeneratorMismatch, "generator index out of range");
  if (!c.is_zero()) r.terms_.emplace(std::uint64_t{1} << index, c);
  return r;
}

void ExteriorElement::check(const ExteriorElement& o) const {
  if (ngen_ != o.ngen_) throw Error(ErrorKind::GeneratorMismatch, "different generator universes");
  if (!same_vars(vars_, o.vars_)) throw Error(ErrorKind::VariableMismatch, "different coefficient variables");
}

ExteriorElement ExteriorElement::operator+(const ExteriorElement& o) const {
  check(o);
  ExteriorElement r = *this;
  for (auto& [m, c] : o.terms_) {
    auto it = r.terms_.find(m);
    if (it == r.terms_.end()) {
      r.terms_.emplace(m, c);
    } else {
      it->second += c;
      if (it->second.is_zero()) r.terms_.erase(it);
    }
  }
  return r;
}

ExteriorElement ExteriorElement::operator-(const ExteriorElement& o) const {
  return *this + o * Polynomial::constant(o.vars_, -1);
}

ExteriorElement ExteriorElement::operator*(const Polynomial& c) const {
  ExteriorElement r(ngen_, vars_);
  for (auto& [m, x] : terms_) {
    Polynomial p = x * c;
    if (!p.is_zero()) r.terms_.emplace(m, std::move(p));
  }
  return r;
}

ExteriorElement ExteriorElement::wedge(const ExteriorElement& o) const {
  check(o);
  ExteriorElement r(ngen_, vars_);
  for (auto& [ma, ca] : terms_)
    for (auto& [mb, cb] : o.terms_) {
      if (ma & mb) continue;
      Polynomial p = ca * cb;
      if (koszul_sign(ma, mb) < 0) p = -p;
      auto it = r.terms_.find(ma | mb);
      if (it == r.terms_.end()) {
        if (!p.is_zero()) r.terms_.emplace(ma | mb, std::move(p));
      } else {
        it->second += p;
        if (it->second.is_zero()) r.terms_.erase(it);
      }
    }
  return r;
}

Polynomial ExteriorElement::extract_component(std::uint64_t generators) const {
  auto it = terms_.find(generators);
  if (it == terms_.end()) return Polynomial(vars_);
  return it->second;
}

ExteriorElement ExteriorElement::filtered(std::uint64_t mask, std::uint64_t pattern) const {
  ExteriorElement r(ngen_, vars_);
  for (auto& [m, c] : terms_)
    if ((m & mask) == pattern) r.terms_.emplace(m, c);
  return r;
}

std::string ExteriorElement::to_string(const std::vector<std::string>& names) const {
  if (terms_.empty()) return "0";
  std::ostringstream o;
  bool first = true;
  for (auto& [m, c] : terms_) {
    if (!first) o << " + ";
    first = false;
    o << "(" << c.to_string() << ")";
    for (int i = 0; i < ngen_; ++i)
      if ((m >> i) & 1u) o << "*" << (i < static_cast<int>(names.size()) ? names[i] : "g" + std::to_string(i));
  }
  return o.str();
}

}  // namespace feyn
