#include "feyn/amplitude.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <random>

#include "feyn/errors.hpp"
#include "feyn/graph_polynomials.hpp"
#include "feyn/schwinger_space.hpp"
#include "gth.hpp"

namespace feyn {

// ------------------------------------------------------------------ test forms

std::vector<cplx> TestForm::flat_momenta() const {
  std::vector<cplx> k;
  for (auto& v : momenta) k.insert(k.end(), v.begin(), v.end());
  return k;
}

cplx TestForm::poly_value(const cplx* wbar) const {
  cplx s = 0;
  for (auto& [c, ex] : polynomial) {
    cplx term = c;
    for (size_t i = 0; i < ex.size(); ++i)
      for (int p = 0; p < ex[i]; ++p) term *= wbar[i];
    s += term;
  }
  return s;
}

bool TestForm::is_zero() const {
  if (ground_norm == 0) return true;
  for (auto& [c, ex] : polynomial)
    if (c != cplx(0)) return false;
  return true;
}

namespace {

cplx json_complex(const nlohmann::json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
  throw Error(ErrorKind::Parse, "complex numbers are [re, im] pairs");
}

}  // namespace

TestForm test_form_from_json(const nlohmann::json& j) {
  try {
    TestForm phi;
    phi.momenta.clear();
    for (auto& vertex : j.at("momenta")) {
      std::vector<cplx> k;
      for (auto& c : vertex) k.push_back(json_complex(c));
      phi.momenta.push_back(k);
    }
    if (phi.momenta.empty()) throw Error(ErrorKind::Parse, "test form needs momenta for at least one vertex");
    phi.dim = static_cast<int>(phi.momenta[0].size());
    for (auto& k : phi.momenta)
      if (static_cast<int>(k.size()) != phi.dim || phi.dim < 1)
        throw Error(ErrorKind::Parse, "every momentum needs the same positive number of coordinates");
    if (j.contains("dim") && j["dim"].get<int>() != phi.dim) throw Error(ErrorKind::Parse, "dim disagrees with momenta");
    phi.width = j.value("width", 1.0);
    if (!(phi.width > 0)) throw Error(ErrorKind::Parse, "width must be positive");
    phi.ground_norm = j.value("ground_norm", 1.0);
    if (j.contains("polynomial")) {
      phi.polynomial.clear();
      const int ngen = phi.dim * phi.num_relative();
      for (auto& t : j["polynomial"]) {
        std::vector<int> ex = t.value("exponents", std::vector<int>{});
        if (static_cast<int>(ex.size()) > ngen) throw Error(ErrorKind::Parse, "too many polynomial exponents");
        for (int e : ex)
          if (e < 0) throw Error(ErrorKind::Parse, "negative polynomial exponent");
        phi.polynomial.emplace_back(json_complex(t.at("coefficient")), ex);
      }
    }
    if (j.contains("selection") && !(j["selection"].is_string() && j["selection"] == "auto")) {
      phi.auto_selection = false;
      for (auto& p : j["selection"]) {
        int v = p.at(0).get<int>(), c = p.at(1).get<int>();
        if (v < 1 || v > phi.num_relative() || c < 1 || c > phi.dim)
          throw Error(ErrorKind::Parse, "selection entry out of range");
        phi.selection.push_back((v - 1) * phi.dim + (c - 1));
      }
    }
    return phi;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("test form JSON: ") + e.what());
  }
}

nlohmann::json test_form_to_json(const TestForm& phi) {
  nlohmann::json j;
  j["dim"] = phi.dim;
  j["momenta"] = nlohmann::json::array();
  for (auto& v : phi.momenta) {
    auto row = nlohmann::json::array();
    for (auto& c : v) row.push_back({c.real(), c.imag()});
    j["momenta"].push_back(row);
  }
  j["width"] = phi.width;
  j["ground_norm"] = phi.ground_norm;
  j["polynomial"] = nlohmann::json::array();
  for (auto& [c, ex] : phi.polynomial) j["polynomial"].push_back({{"coefficient", {c.real(), c.imag()}}, {"exponents", ex}});
  if (phi.auto_selection) {
    j["selection"] = "auto";
  } else {
    j["selection"] = nlohmann::json::array();
    for (int s : phi.selection) j["selection"].push_back({s / phi.dim + 1, s % phi.dim + 1});
  }
  return j;
}

TestForm load_test_form(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::Parse, "cannot open test form " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("test form JSON: ") + e.what());
  }
  return test_form_from_json(j);
}

std::uint64_t resolve_selection(const TestForm& phi, int num_generators, int degree) {
  if (degree < 0 || degree > num_generators)
    throw Error(ErrorKind::DegreeMismatch, "no test form of degree " + std::to_string(degree));
  if (phi.auto_selection) return degree == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << degree) - 1;
  std::uint64_t mask = 0;
  for (int s : phi.selection) {
    if (s >= num_generators) throw Error(ErrorKind::DegreeMismatch, "selection outside the generator range");
    mask |= std::uint64_t{1} << s;
  }
  if (std::popcount(mask) != degree)
    throw Error(ErrorKind::DegreeMismatch, "test form carries degree " + std::to_string(std::popcount(mask)) +
                                               ", pairing needs " + std::to_string(degree));
  return mask;
}

std::vector<std::uint64_t> all_selections(int num_generators, int degree) {
  std::vector<std::uint64_t> out;
  if (degree < 0 || degree > num_generators) return out;
  if (degree == 0) return {0};
  std::uint64_t x = (std::uint64_t{1} << degree) - 1, limit = std::uint64_t{1} << num_generators;
  while (x < limit) {
    out.push_back(x);
    std::uint64_t c = x & -x, r = x + c;
    x = (((r ^ x) >> 2) / c) | r;
  }
  return out;
}

int required_test_form_degree(const DecoratedGraph& g, int d) {
  return d * (g.num_vertices() - 1) - (d - 1) * g.num_edges();
}

std::optional<EdgeSubset> dimension_violation(const DecoratedGraph& g, int d) {
  const int n = g.num_vertices(), m = g.num_edges();
  // for a fixed vertex set the induced edges violate the most, and a violating
  // edge set always has a violating connected component
  for (std::uint64_t vm = 1; vm < (std::uint64_t{1} << n); ++vm) {
    if (std::popcount(vm) < 2) continue;
    std::uint64_t em = 0;
    for (int e = 0; e < m; ++e)
      if (((vm >> (g.edge(e).tail - 1)) & 1) && ((vm >> (g.edge(e).head - 1)) & 1)) em |= std::uint64_t{1} << e;
    if (!em) continue;
    EdgeSubset all(m, em);
    if (laman_inequality(d, touched_vertex_count(g, all), all.size())) continue;
    // split into components
    std::uint64_t left = em;
    while (left) {
      std::uint64_t comp = left & -left, grown = 0;
      while (grown != comp) {
        grown = comp;
        for (int e : EdgeSubset(m, left).indices()) {
          for (int f : EdgeSubset(m, comp).indices()) {
            const auto &a = g.edge(e), &b = g.edge(f);
            if (a.tail == b.tail || a.tail == b.head || a.head == b.tail || a.head == b.head) {
              comp |= std::uint64_t{1} << e;
              break;
            }
          }
        }
      }
      EdgeSubset c(m, comp);
      if (!laman_inequality(d, touched_vertex_count(g, c), c.size())) return c;
      left &= ~comp;
    }
  }
  return std::nullopt;
}

// ------------------------------------------------------------------ propagator product

VarList propagator_coefficient_vars(const DecoratedGraph& g) {
  std::vector<std::string> names;
  for (int e = 0; e < g.num_edges(); ++e) names.push_back("s" + std::to_string(e + 1));
  for (int i = 1; i < g.num_vertices(); ++i)
    for (int j = 1; j <= g.dim(); ++j) names.push_back("wb" + std::to_string(i) + "_" + std::to_string(j));
  return make_vars(names);
}

std::vector<std::string> propagator_generator_names(const DecoratedGraph& g) {
  std::vector<std::string> names;
  for (int e = 0; e < g.num_edges(); ++e) names.push_back("dt" + std::to_string(e + 1));
  for (int i = 1; i < g.num_vertices(); ++i)
    for (int j = 1; j <= g.dim(); ++j) names.push_back("dwb" + std::to_string(i) + "_" + std::to_string(j));
  return names;
}

ExteriorElement propagator_product(const DecoratedGraph& g) {
  auto rho = incidence_matrix(g);
  const int m = g.num_edges(), d = g.dim(), nrel = g.num_vertices() - 1;
  if (m == 0) throw Error(ErrorKind::InvalidArgument, "graph has no edges");
  const int ngen = m + d * nrel;
  if (ngen > 64) throw Error(ErrorKind::InvalidArgument, "more than 64 form generators");
  VarList vars = propagator_coefficient_vars(g);
  ExteriorElement result = ExteriorElement::scalar(ngen, Polynomial::constant(vars, 1));
  for (int e = 0; e < m; ++e) {
    Polynomial s = Polynomial::variable(vars, e);
    Polynomial factor = Polynomial::constant(vars, 1);
    std::vector<ExteriorElement> dy;
    for (int j = 0; j < d; ++j) {
      Polynomial u(vars);
      for (int i = 0; i < nrel; ++i)
        if (rho[e][i]) u += Polynomial::variable(vars, m + i * d + j) * Rational(rho[e][i]);
      factor = factor * (s * u).pow(g.edge(e).decoration[j]);
      // dy = s sum_i rho_i dwbar_i - 2 s^2 u dt_e
      ExteriorElement form = ExteriorElement::generator(ngen, e, s * s * u * Rational(-2));
      for (int i = 0; i < nrel; ++i)
        if (rho[e][i]) form = form + ExteriorElement::generator(ngen, m + i * d + j, s * Rational(rho[e][i]));
      dy.push_back(form);
    }
    ExteriorElement piece = ExteriorElement::scalar(ngen, factor);
    for (auto& f : dy) piece = piece.wedge(f);
    result = result.wedge(piece);
  }
  return result;
}

// ------------------------------------------------------------------ compiled polynomials

CompiledPolynomial::CompiledPolynomial(const Polynomial& p) : nvars_(p.num_vars()) {
  for (auto& [ex, c] : p.terms()) {
    Term t;
    t.coef = c.get_d();
    for (int v = 0; v < static_cast<int>(ex.size()); ++v)
      if (ex[v]) t.factors.emplace_back(v, ex[v]);
    terms_.push_back(std::move(t));
  }
}

// ------------------------------------------------------------------ engine

FormEngine::FormEngine(const DecoratedGraph& g)
    : g_(g), d_(g.dim()), m_(g.num_edges()), n_rel_(g.num_vertices() - 1) {
  auto rho = incidence_matrix(g_);
  rho_.assign(m_, std::vector<double>(n_rel_));
  for (int e = 0; e < m_; ++e)
    for (int i = 0; i < n_rel_; ++i) rho_[e][i] = rho[e][i];
  ends_ = detail::edge_ends(rho_);
  ExteriorElement prod = propagator_product(g_);
  for (auto& [mask, c] : prod.terms()) {
    symbolic_.emplace(mask, c);
    compiled_.emplace(mask, CompiledPolynomial(c));
    const int deg = s_degree(mask & full_dt());
    for (auto& [ex, q] : c.terms()) {
      int sd = 0;
      for (int e = 0; e < m_; ++e) sd += ex[e];
      if (sd != deg) throw Error(ErrorKind::Assertion, "propagator component is not homogeneous in s");
    }
  }
}

const CompiledPolynomial* FormEngine::component(std::uint64_t dt_mask, std::uint64_t wbar_mask) const {
  auto it = compiled_.find(dt_mask | (wbar_mask << m_));
  return it == compiled_.end() ? nullptr : &it->second;
}

const Polynomial* FormEngine::symbolic_component(std::uint64_t dt_mask, std::uint64_t wbar_mask) const {
  auto it = symbolic_.find(dt_mask | (wbar_mask << m_));
  return it == symbolic_.end() ? nullptr : &it->second;
}

int FormEngine::paired_degree(std::uint64_t dt_mask) const {
  return num_wbar() - (d_ * m_ - std::popcount(dt_mask));
}

int FormEngine::pairing_sign(std::uint64_t selection) const {
  std::uint64_t all = num_wbar() == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << num_wbar()) - 1;
  return koszul_sign(all & ~selection, selection);
}

template <class T>
FormEngine::Frame<T> FormEngine::frame(const double* t, double shift) const {
  Frame<T> f;
  auto inv = detail::gth_inverse<T>(ends_, n_rel_, t, 0.5, shift);
  f.inverse = std::move(inv.inverse);
  f.n = n_rel_;
  f.log_norm = -d_ * m_ * std::log(M_PI) + d_ * (n_rel_ * std::log(M_PI) - inv.log_det);
  double tmin = *std::min_element(t, t + m_);
  f.log_sigma = -std::log(2 * tmin);
  f.s_hat.resize(m_);
  for (int e = 0; e < m_; ++e) f.s_hat[e] = T(tmin) / T(t[e]);
  return f;
}

template FormEngine::Frame<double> FormEngine::frame<double>(const double*, double) const;
template FormEngine::Frame<__float128> FormEngine::frame<__float128>(const double*, double) const;

bool FormEngine::wide(const double* t) const {
  auto [lo, hi] = std::minmax_element(t, t + m_);
  return *hi > kWideRatio * *lo;
}

int FormEngine::s_degree(std::uint64_t dt_mask) const {
  // each edge contributes its decoration total and d generators, one more when dt_e is taken
  return g_.decoration_total() + d_ * m_ + std::popcount(dt_mask);
}

namespace {

template <class T>
struct GaussData {
  std::vector<std::complex<T>> wbar;  // A^-1 k, flattened i*d+j
  double exponent = 0;                // -sum_j conj(k_j)^T A^-1 k_j
};

template <class T>
GaussData<T> gauss(const FormEngine::Frame<T>& f, const std::vector<cplx>& k, int d) {
  using C = std::complex<T>;
  const int n = f.n;
  GaussData<T> g;
  g.wbar.assign(n * d, C(0));
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < n; ++i) {
      C w = 0;
      for (int l = 0; l < n; ++l) w += f.inv(i, l) * C(T(k[l * d + j].real()), T(k[l * d + j].imag()));
      g.wbar[i * d + j] = w;
    }
  T ex = 0;
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < n; ++i) {
      const C& w = g.wbar[i * d + j];
      ex -= T(k[i * d + j].real()) * w.real() + T(k[i * d + j].imag()) * w.imag();
    }
  g.exponent = static_cast<double>(ex);
  return g;
}

template <class T>
cplx to_double(const std::complex<T>& z) {
  return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}

Eigen::MatrixXd laplacian(const std::vector<std::vector<double>>& rho, const double* t, int nrel) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nrel, nrel);
  for (size_t e = 0; e < rho.size(); ++e)
    for (int i = 0; i < nrel; ++i)
      if (rho[e][i] != 0)
        for (int j = 0; j < nrel; ++j) M(i, j) += rho[e][i] * rho[e][j] / t[e];
  return M;
}

}  // namespace

template <class T>
cplx FormEngine::gaussian_in(const CompiledPolynomial& comp, std::uint64_t dt_mask, std::uint64_t selection,
                             const double* t, const TestForm& phi) const {
  auto f = frame<T>(t, phi.width);
  auto gd = gauss(f, phi.flat_momenta(), d_);
  std::vector<std::complex<T>> x(m_ + num_wbar());
  for (int e = 0; e < m_; ++e) x[e] = f.s_hat[e];
  for (int i = 0; i < num_wbar(); ++i) x[m_ + i] = gd.wbar[i];
  std::vector<cplx> wbar(num_wbar());
  for (int i = 0; i < num_wbar(); ++i) wbar[i] = to_double(gd.wbar[i]);
  double scale = std::exp(f.log_norm + s_degree(dt_mask) * f.log_sigma + gd.exponent);
  return scale * to_double(comp.eval(x.data())) * phi.poly_value(wbar.data()) * double(pairing_sign(selection)) *
         phi.ground_norm;
}

template <class T>
cplx FormEngine::leading_in(const CompiledPolynomial& comp, std::uint64_t dt_mask, std::uint64_t selection,
                            const double* t, const std::vector<cplx>& k) const {
  auto f = frame<T>(t, 0.0);
  auto gd = gauss(f, k, d_);
  std::vector<std::complex<T>> x(m_ + num_wbar());
  for (int e = 0; e < m_; ++e) x[e] = f.s_hat[e];
  for (int i = 0; i < num_wbar(); ++i) x[m_ + i] = gd.wbar[i];
  return std::exp(f.log_norm + s_degree(dt_mask) * f.log_sigma) * to_double(comp.eval(x.data())) *
         double(pairing_sign(selection));
}

cplx FormEngine::gaussian(std::uint64_t dt_mask, std::uint64_t selection, const double* t, const TestForm& phi) const {
  if (std::popcount(selection) != paired_degree(dt_mask)) return 0;
  std::uint64_t all = (std::uint64_t{1} << num_wbar()) - 1;
  const CompiledPolynomial* comp = component(dt_mask, all & ~selection);
  if (!comp) return 0;
  return wide(t) ? gaussian_in<__float128>(*comp, dt_mask, selection, t, phi)
                 : gaussian_in<double>(*comp, dt_mask, selection, t, phi);
}

cplx FormEngine::leading(std::uint64_t dt_mask, std::uint64_t selection, const double* t,
                         const std::vector<cplx>& k) const {
  if (std::popcount(selection) != paired_degree(dt_mask)) return 0;
  std::uint64_t all = (std::uint64_t{1} << num_wbar()) - 1;
  const CompiledPolynomial* comp = component(dt_mask, all & ~selection);
  if (!comp) return 0;
  return wide(t) ? leading_in<__float128>(*comp, dt_mask, selection, t, k)
                 : leading_in<double>(*comp, dt_mask, selection, t, k);
}

cplx FormEngine::propagator_value(std::uint64_t dt_mask, std::uint64_t selection, const double* t,
                                  const cplx* wbar) const {
  if (std::popcount(selection) != paired_degree(dt_mask)) return 0;
  std::uint64_t all = (std::uint64_t{1} << num_wbar()) - 1;
  const CompiledPolynomial* comp = component(dt_mask, all & ~selection);
  if (!comp) return 0;
  std::vector<cplx> x(m_ + num_wbar());
  for (int e = 0; e < m_; ++e) x[e] = 1 / (2 * t[e]);
  for (int i = 0; i < num_wbar(); ++i) x[m_ + i] = wbar[i];
  return (*comp)(x.data()) * double(pairing_sign(selection));
}

// ------------------------------------------------------------------ integrand

SchwingerIntegrand::SchwingerIntegrand(const DecoratedGraph& g, const TestForm& phi)
    : engine_(std::make_shared<FormEngine>(g)), phi_(phi) {
  int degree = required_test_form_degree(g, g.dim());
  if (degree < 0 || phi.is_zero()) {
    zero_ = true;
    return;
  }
  if (phi.dim != g.dim() || phi.num_relative() != g.num_vertices() - 1)
    throw Error(ErrorKind::DegreeMismatch, "test form dimensions do not match the graph");
  selection_ = resolve_selection(phi, engine_->num_wbar(), degree);
}

cplx SchwingerIntegrand::operator()(const double* t) const {
  if (zero_) return 0;
  return engine_->gaussian(engine_->full_dt(), selection_, t, phi_);
}

double SchwingerIntegrand::exponent(const double* t) const {
  return gauss(engine_->frame<double>(t, phi_.width), phi_.flat_momenta(), engine_->dim()).exponent;
}

SchwingerIntegrand wick_reduce(const DecoratedGraph& g, const TestForm& phi) { return SchwingerIntegrand(g, phi); }

// ------------------------------------------------------------------ evaluation

IntegralResult evaluate_W(const DecoratedGraph& g, const TestForm& phi, double eps, double L, const QuadConfig& cfg,
                          const EvalOptions& opt) {
  g.require_simple_connected();
  if (eps < 0) throw Error(ErrorKind::NonPositiveEpsilon, "eps must be non-negative");
  if (!(L > eps)) throw Error(ErrorKind::InvalidArgument, "need L > eps");
  if (opt.short_circuit && dimension_violation(g, g.dim())) return {};
  SchwingerIntegrand W(g, phi);
  if (W.is_zero()) return {};
  const int m = g.num_edges();
  const bool infinite = std::isinf(L);
  if (eps > 0) {
    std::vector<double> lo(m, 0.0), hi(m, infinite ? 1.0 : L - eps);
    return integrate_box_complex(
        m,
        [&](const double* x) {
          std::vector<double> t(m);
          double jac = 1;
          for (int e = 0; e < m; ++e) {
            if (infinite) {
              t[e] = eps + x[e] / (1 - x[e]);
              jac /= (1 - x[e]) * (1 - x[e]);
            } else {
              t[e] = eps + x[e];
            }
          }
          return W(t.data()) * jac;
        },
        lo, hi, cfg);
  }
  // polar chart at the origin: t = r * xi, last coordinate is the radius
  return integrate_box_complex(
      m,
      [&](const double* x) {
        std::vector<double> xi(m, 1.0), t(m);
        double w = m > 1 ? sphere_from_cube(m, x, xi.data()) : 1.0;
        if (w == 0) return cplx(0);
        double u = x[m - 1], r, jac;
        if (infinite) {
          r = u / (1 - u);
          jac = 1 / ((1 - u) * (1 - u));
        } else {
          double rmax = L / *std::max_element(xi.begin(), xi.end());
          r = u * rmax;
          jac = rmax;
        }
        if (r == 0) return cplx(0);
        for (int e = 0; e < m; ++e) t[e] = r * xi[e];
        return W(t.data()) * (w * jac * std::pow(r, m - 1));
      },
      std::vector<double>(m, 0.0), std::vector<double>(m, 1.0), cfg);
}

IntegralResult mc_oracle_W(const DecoratedGraph& g, const TestForm& phi, double eps, double L, long samples,
                           std::uint64_t seed, int threads) {
  g.require_simple_connected();
  if (!(eps > 0)) throw Error(ErrorKind::NonPositiveEpsilon, "Monte-Carlo oracle needs eps > 0");
  if (!(L > eps) || std::isinf(L)) throw Error(ErrorKind::InvalidArgument, "Monte-Carlo oracle needs finite L > eps");
  if (samples < 2) throw Error(ErrorKind::InvalidArgument, "need at least two samples");
  SchwingerIntegrand W(g, phi);
  if (W.is_zero()) return {0, 0, samples};
  const FormEngine& eng = W.engine();
  const int m = eng.num_edges(), d = eng.dim(), nrel = eng.num_relative();
  const double vol = std::pow(L - eps, m);
  const std::vector<cplx> k = phi.flat_momenta();
  const std::uint64_t sel = W.selection();

  constexpr long kChunk = 4096;
  const long chunks = (samples + kChunk - 1) / kChunk;
  struct Acc {
    double sr = 0, si = 0, qr = 0, qi = 0;
  };
  std::vector<Acc> acc(chunks);
  parallel_for(static_cast<int>(chunks), threads, [&](int c) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(c)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    std::vector<double> t(m);
    std::vector<cplx> w(nrel * d), wbar(nrel * d);
    const long begin = c * kChunk, end = std::min(samples, begin + kChunk);
    Acc a;
    for (long s = begin; s < end; ++s) {
      for (int e = 0; e < m; ++e) t[e] = eps + (L - eps) * unif(rng);
      Eigen::MatrixXd B = laplacian(eng.incidence(), t.data(), nrel) * 0.5;
      Eigen::LLT<Eigen::MatrixXd> llt(B);
      double detB = 1;
      for (int i = 0; i < nrel; ++i) detB *= llt.matrixL()(i, i) * llt.matrixL()(i, i);
      // covariance B^-1: solve L^T w = zeta per coordinate
      for (int j = 0; j < d; ++j) {
        Eigen::VectorXd zr(nrel), zi(nrel);
        for (int i = 0; i < nrel; ++i) {
          zr(i) = normal(rng);
          zi(i) = normal(rng);
        }
        Eigen::VectorXd xr = llt.matrixU().solve(zr), xi = llt.matrixU().solve(zi);
        for (int i = 0; i < nrel; ++i) w[i * d + j] = cplx(xr(i), xi(i));
      }
      double w2 = 0;
      cplx phase = 0;
      for (int i = 0; i < nrel * d; ++i) {
        wbar[i] = std::conj(w[i]);
        w2 += std::norm(w[i]);
        phase += k[i] * w[i] - std::conj(k[i]) * wbar[i];
      }
      cplx f = std::exp(-phi.width * w2 + phase) * phi.poly_value(wbar.data()) * phi.ground_norm;
      double norm = vol * std::pow(M_PI, -d * m) * std::pow(std::pow(M_PI, nrel) / detB, d);
      cplx v = norm * eng.propagator_value(eng.full_dt(), sel, t.data(), wbar.data()) * f;
      a.sr += v.real();
      a.si += v.imag();
      a.qr += v.real() * v.real();
      a.qi += v.imag() * v.imag();
    }
    acc[c] = a;
  });
  Acc tot;
  for (auto& a : acc) {
    tot.sr += a.sr;
    tot.si += a.si;
    tot.qr += a.qr;
    tot.qi += a.qi;
  }
  const double n = static_cast<double>(samples);
  cplx mean(tot.sr / n, tot.si / n);
  double vr = std::max(0.0, tot.qr / n - mean.real() * mean.real()) * n / (n - 1);
  double vi = std::max(0.0, tot.qi / n - mean.imag() * mean.imag()) * n / (n - 1);
  return {mean, std::sqrt((vr + vi) / n), samples};
}

}  // namespace feyn
