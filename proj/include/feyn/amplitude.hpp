#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "feyn/graph.hpp"
#include "feyn/quadrature.hpp"
#include "feyn/symbolic.hpp"
#include "json.hpp"

namespace feyn {

using cplx = std::complex<double>;

// Gaussian wave packet on relative coordinates times a normalized ground profile:
//   exp(-width |w|^2 + k.w - conj(k).wbar) * poly(wbar) * dwbar_selection
// Relative antiholomorphic generators are indexed i * d + j (vertex i, coordinate j).
struct TestForm {
  int dim = 1;
  std::vector<std::vector<cplx>> momenta;  // [relative vertex][coordinate]
  double width = 1.0;
  std::vector<std::pair<cplx, std::vector<int>>> polynomial{{cplx(1, 0), {}}};  // exponents over i*d+j
  bool auto_selection = true;
  std::vector<int> selection;  // explicit relative generator indices
  double ground_norm = 1.0;

  int num_relative() const { return static_cast<int>(momenta.size()); }
  std::vector<cplx> flat_momenta() const;
  cplx poly_value(const cplx* wbar) const;
  bool is_zero() const;
};

TestForm test_form_from_json(const nlohmann::json& j);
nlohmann::json test_form_to_json(const TestForm& phi);
TestForm load_test_form(const std::string& path);

// Relative selection mask of the requested degree: the explicit one (checked) or,
// for "auto", the lexicographically first generators.
std::uint64_t resolve_selection(const TestForm& phi, int num_generators, int degree);
std::vector<std::uint64_t> all_selections(int num_generators, int degree);

int required_test_form_degree(const DecoratedGraph& g, int d);
std::optional<EdgeSubset> dimension_violation(const DecoratedGraph& g, int d);

// Generators: dt_e (index e), then dwbar_i^j (index m + i*d + j). Coefficient
// variables: s_e = 1/(2 t_e), then wb<i>_<j>.
ExteriorElement propagator_product(const DecoratedGraph& g);
std::vector<std::string> propagator_generator_names(const DecoratedGraph& g);
VarList propagator_coefficient_vars(const DecoratedGraph& g);

// Fast numeric form of a polynomial.
class CompiledPolynomial {
 public:
  CompiledPolynomial() = default;
  explicit CompiledPolynomial(const Polynomial& p);
  cplx operator()(const cplx* x) const { return eval(x); }
  template <class T>
  std::complex<T> eval(const std::complex<T>* x) const {
    std::complex<T> s = 0;
    for (auto& t : terms_) {
      std::complex<T> v = T(t.coef);
      for (auto [var, p] : t.factors)
        for (int k = 0; k < p; ++k) v *= x[var];
      s += v;
    }
    return s;
  }
  bool empty() const { return terms_.empty(); }
  int num_vars() const { return nvars_; }
  struct Term {
    double coef;
    std::vector<std::pair<int, int>> factors;  // (variable, exponent)
  };
  const std::vector<Term>& terms() const { return terms_; }

 private:
  int nvars_ = 0;
  std::vector<Term> terms_;
};

// Position-integrated pieces of the propagator product paired with a test form.
class FormEngine {
 public:
  explicit FormEngine(const DecoratedGraph& g);
  const DecoratedGraph& graph() const { return g_; }
  int dim() const { return d_; }
  int num_edges() const { return m_; }
  int num_relative() const { return n_rel_; }
  int num_wbar() const { return d_ * n_rel_; }
  std::uint64_t full_dt() const { return (std::uint64_t{1} << m_) - 1; }

  // Propagator coefficient of dt_T ^ dwbar_D; nullptr when absent.
  const CompiledPolynomial* component(std::uint64_t dt_mask, std::uint64_t wbar_mask) const;
  const Polynomial* symbolic_component(std::uint64_t dt_mask, std::uint64_t wbar_mask) const;
  // Test-form degree pairing with the dt_T component.
  int paired_degree(std::uint64_t dt_mask) const;
  // Sign of dwbar_D ^ dwbar_S in canonical order, D the complement of S.
  int pairing_sign(std::uint64_t selection) const;

  // Coefficient of dt_T after pairing with the Gaussian test form and
  // integrating all positions in closed form.
  cplx gaussian(std::uint64_t dt_mask, std::uint64_t selection, const double* t, const TestForm& phi) const;
  // Same with the Gaussian width and conj(k) dropped: pairing with exp(k.w) dwbar_S.
  cplx leading(std::uint64_t dt_mask, std::uint64_t selection, const double* t, const std::vector<cplx>& k) const;
  // Non-Gaussian remainder at sampled positions, used by the Monte-Carlo oracle.
  cplx propagator_value(std::uint64_t dt_mask, std::uint64_t selection, const double* t, const cplx* wbar) const;

  const std::vector<std::vector<double>>& incidence() const { return rho_; }

  // Pieces shared by the Gaussian pairings at one point t, kept in log form so
  // that spread-out t neither overflows s_e = 1/(2 t_e) nor underflows det A.
  template <class T>
  struct Frame {
    double log_norm = 0;   // log of pi^{-dm} (pi^N / det A)^d
    double log_sigma = 0;  // sigma = max_e s_e
    std::vector<T> s_hat;  // s_e / sigma
    std::vector<T> inverse;  // A^-1 row-major, A = M/2 + shift
    int n = 0;
    T inv(int i, int l) const { return inverse[i * n + l]; }
  };
  template <class T>
  Frame<T> frame(const double* t, double shift) const;
  // Spread of t beyond which double rounding swamps the cancellations near
  // sphere faces; the pairings then run in quad precision.
  static constexpr double kWideRatio = 1e3;
  bool wide(const double* t) const;
  // Total degree in the s_e of a component; every component is homogeneous in them.
  int s_degree(std::uint64_t dt_mask) const;

 private:
  template <class T>
  cplx gaussian_in(const CompiledPolynomial& comp, std::uint64_t dt_mask, std::uint64_t selection, const double* t,
                   const TestForm& phi) const;
  template <class T>
  cplx leading_in(const CompiledPolynomial& comp, std::uint64_t dt_mask, std::uint64_t selection, const double* t,
                  const std::vector<cplx>& k) const;

  DecoratedGraph g_;
  int d_, m_, n_rel_;
  std::vector<std::vector<double>> rho_;
  std::vector<std::pair<int, int>> ends_;
  std::map<std::uint64_t, Polynomial> symbolic_;
  std::map<std::uint64_t, CompiledPolynomial> compiled_;
};

// The all-dt coefficient of the paired integrand as a function of t.
class SchwingerIntegrand {
 public:
  SchwingerIntegrand(const DecoratedGraph& g, const TestForm& phi);
  bool is_zero() const { return zero_; }
  std::uint64_t selection() const { return selection_; }
  cplx operator()(const double* t) const;
  // Exponent -sum_j k_j^T A^-1 conj(k_j) with A = M(t)/2 + width.
  double exponent(const double* t) const;
  const FormEngine& engine() const { return *engine_; }

 private:
  std::shared_ptr<FormEngine> engine_;
  TestForm phi_;
  std::uint64_t selection_ = 0;
  bool zero_ = false;
};

SchwingerIntegrand wick_reduce(const DecoratedGraph& g, const TestForm& phi);

struct EvalOptions {
  bool short_circuit = true;
};

// eps = 0 integrates in the polar chart at the origin; L may be infinity.
IntegralResult evaluate_W(const DecoratedGraph& g, const TestForm& phi, double eps, double L, const QuadConfig& cfg,
                          const EvalOptions& opt = {});
IntegralResult mc_oracle_W(const DecoratedGraph& g, const TestForm& phi, double eps, double L, long samples,
                           std::uint64_t seed, int threads = 1);

}  // namespace feyn
