#include "feyn/anomaly.hpp"

#include <Eigen/Dense>
#include <bit>
#include <cmath>
#include <sstream>

#include "feyn/errors.hpp"
#include "feyn/graph_polynomials.hpp"
#include "feyn/schwinger_space.hpp"

namespace feyn {

std::string VanishingCertificate::describe() const {
  std::ostringstream o;
  if (violating) o << "violating subgraph " << violating->to_string() << "; ";
  o << "power " << power;
  return o.str();
}

VanishingCertificate anomaly_vanishes_exactly(const DecoratedGraph& g, int d) {
  if (g.has_self_loop()) throw Error(ErrorKind::SelfLoop, "graph has a self-loop");
  VanishingCertificate c;
  c.power = d * g.num_vertices() - (d - 1) * g.num_edges() - g.num_components() * (d + 1);
  c.violating = dimension_violation(g, d);
  c.vanishes = c.power > 0 || c.violating.has_value();
  return c;
}

namespace {

using KPoly = std::map<std::vector<int>, double>;

std::uint64_t bit(int e) { return std::uint64_t{1} << e; }

template <class T>
KPoly leading_in_k_as(const FormEngine& eng, const CompiledPolynomial& comp, std::uint64_t dt_mask,
                      std::uint64_t selection, const double* t) {
  const int K = eng.num_wbar(), d = eng.dim(), m = eng.num_edges(), n = eng.num_relative();
  auto f = eng.frame<T>(t, 0.0);
  std::map<std::vector<int>, T> acc;
  for (auto& term : comp.terms()) {
    T c = term.coef;
    std::map<std::vector<int>, T> p{{std::vector<int>(K, 0), T(1)}};
    for (auto [var, power] : term.factors) {
      if (var < m) {
        for (int r = 0; r < power; ++r) c *= f.s_hat[var];
        continue;
      }
      // wbar_i^j = sum_l (A^-1)_il k_l^j
      const int i = (var - m) / d, j = (var - m) % d;
      for (int r = 0; r < power; ++r) {
        std::map<std::vector<int>, T> next;
        for (auto& [ex, v] : p)
          for (int l = 0; l < n; ++l) {
            auto e2 = ex;
            ++e2[l * d + j];
            next[e2] += v * f.inv(i, l);
          }
        p.swap(next);
      }
    }
    for (auto& [ex, v] : p) acc[ex] += c * v;
  }
  const double norm = std::exp(f.log_norm + eng.s_degree(dt_mask) * f.log_sigma) * eng.pairing_sign(selection);
  KPoly out;
  for (auto& [ex, v] : acc) out[ex] = norm * static_cast<double>(v);
  return out;
}

// The leading pairing of the dt_T component as a polynomial in the momenta.
KPoly leading_in_k(const FormEngine& eng, std::uint64_t dt_mask, std::uint64_t selection, const double* t) {
  if (std::popcount(selection) != eng.paired_degree(dt_mask)) return {};
  const CompiledPolynomial* comp = eng.component(dt_mask, ((std::uint64_t{1} << eng.num_wbar()) - 1) & ~selection);
  if (!comp) return {};
  return eng.wide(t) ? leading_in_k_as<__float128>(eng, *comp, dt_mask, selection, t)
                     : leading_in_k_as<double>(eng, *comp, dt_mask, selection, t);
}

void monomials_of_degree(int nvars, int degree, std::vector<int>& cur, int pos, std::vector<std::vector<int>>& out) {
  if (pos == nvars - 1) {
    cur[pos] = degree;
    out.push_back(cur);
    return;
  }
  for (int a = degree; a >= 0; --a) {
    cur[pos] = a;
    monomials_of_degree(nvars, degree - a, cur, pos + 1, out);
  }
}

}  // namespace

cplx AnomalySymbol::evaluate(std::uint64_t selection, const std::vector<cplx>& k) const {
  for (auto& b : blocks) {
    if (b.selection != selection) continue;
    cplx s = 0;
    for (auto& [ex, c] : b.coefficients) {
      cplx term = c;
      for (size_t i = 0; i < ex.size(); ++i)
        for (int p = 0; p < ex[i]; ++p) term *= k[i];
      s += term;
    }
    return s;
  }
  throw Error(ErrorKind::DegreeMismatch, "symbol has no block for this selection");
}

AnomalySymbol anomaly_symbol(const DecoratedGraph& g, const QuadConfig& cfg) {
  g.require_simple_connected();
  const int d = g.dim();
  if (!is_laman(g, d).laman) throw Error(ErrorKind::NotLaman, "anomaly symbol needs a Laman graph");
  FormEngine eng(g);
  const int m = eng.num_edges(), K = eng.num_wbar();
  AnomalySymbol sym;
  sym.dim = d;
  sym.num_relative = eng.num_relative();
  sym.order = g.decoration_total() + m - 1;
  sym.form_degree = required_test_form_degree(g, d) - 1;
  auto selections = all_selections(K, sym.form_degree);
  std::vector<std::vector<int>> monos;
  std::vector<int> cur(K);
  monomials_of_degree(K, sym.order, cur, 0, monos);
  std::map<std::vector<int>, int> index;
  for (size_t i = 0; i < monos.size(); ++i) index[monos[i]] = static_cast<int>(i);
  const int nm = static_cast<int>(monos.size()), ncomp = nm * static_cast<int>(selections.size());

  VectorIntegrand f = [&](const double* xi, double* out) {
    std::fill(out, out + ncomp, 0.0);
    for (size_t s = 0; s < selections.size(); ++s)
      for (int e = 0; e < m; ++e) {
        KPoly p = leading_in_k(eng, eng.full_dt() & ~bit(e), selections[s], xi);
        double w = (e % 2 ? -1.0 : 1.0) * xi[e];
        for (auto& [ex, v] : p) out[s * nm + index.at(ex)] += w * v;
      }
  };
  auto r = sphere_integrate(m, ncomp, f, cfg);
  for (size_t s = 0; s < selections.size(); ++s) {
    AnomalySymbol::Block b;
    b.selection = selections[s];
    for (int i = 0; i < nm; ++i) {
      b.coefficients[monos[i]] = r.value[s * nm + i];
      b.errors[monos[i]] = r.error[s * nm + i];
    }
    sym.blocks.push_back(b);
  }
  sym.error = r.error_norm();
  sym.evaluations = r.evaluations;
  return sym;
}

cplx o_apply(const AnomalySymbol& sym, const TestForm& phi) {
  if (phi.dim != sym.dim || phi.num_relative() != sym.num_relative)
    throw Error(ErrorKind::DegreeMismatch, "test form dimensions do not match the symbol");
  if (phi.is_zero()) return 0;
  std::uint64_t sel = resolve_selection(phi, sym.dim * sym.num_relative, sym.form_degree);
  std::vector<cplx> origin(sym.dim * sym.num_relative, 0.0);
  return sym.evaluate(sel, phi.flat_momenta()) * phi.poly_value(origin.data()) * phi.ground_norm;
}

IntegralResult boundary_integral_at_radius(const FormEngine& eng, const TestForm& phi, std::uint64_t selection,
                                           double radius, const QuadConfig& cfg) {
  const int m = eng.num_edges();
  VectorIntegrand f = [&](const double* xi, double* out) {
    std::vector<double> t(m);
    for (int e = 0; e < m; ++e) t[e] = radius * xi[e];
    cplx s = 0;
    for (int e = 0; e < m; ++e)
      s += (e % 2 ? -1.0 : 1.0) * xi[e] * eng.gaussian(eng.full_dt() & ~bit(e), selection, t.data(), phi);
    s *= std::pow(radius, m - 1);
    out[0] = s.real();
    out[1] = s.imag();
  };
  auto r = sphere_integrate(m, 2, f, cfg);
  return {{r.value[0], r.value[1]}, r.error_norm(), r.evaluations};
}

BoundaryMagnitude boundary_magnitude(const DecoratedGraph& g, const TestForm& phi, double radius,
                                     const QuadConfig& cfg) {
  g.require_simple_connected();
  BoundaryMagnitude out;
  out.radius = radius;
  int degree = required_test_form_degree(g, g.dim()) - 1;
  if (degree < 0 || phi.is_zero()) return out;
  FormEngine eng(g);
  for (auto sel : all_selections(eng.num_wbar(), degree)) {
    auto r = boundary_integral_at_radius(eng, phi, sel, radius, cfg);
    out.magnitude = std::max(out.magnitude, std::abs(r.value));
    out.error = std::max(out.error, r.error);
    ++out.selections;
  }
  return out;
}

int face_orientation(int num_edges, const EdgeSubset& sub) {
  auto inner = sub.indices(), outer = sub.complement().indices();
  const int k1 = static_cast<int>(inner.size()), k2 = static_cast<int>(outer.size());
  if (k1 == 0 || k2 == 0) throw Error(ErrorKind::InvalidArgument, "faces need a proper nonempty subset");
  auto unit = [](int k) {
    Eigen::VectorXd v(k);
    for (int i = 0; i < k; ++i) v(i) = 1.0 + 0.37 * i;
    return Eigen::VectorXd(v.normalized());
  };
  // tangent frame e_i - <e_i, n> n for i < k-1, with its orientation against n
  auto frame = [](const Eigen::VectorXd& n, int& sign) {
    const int k = static_cast<int>(n.size());
    Eigen::MatrixXd F(k, k - 1), full(k, k);
    full.col(0) = n;
    for (int i = 0; i < k - 1; ++i) {
      Eigen::VectorXd e = Eigen::VectorXd::Unit(k, i);
      F.col(i) = e - e.dot(n) * n;
      full.col(i + 1) = F.col(i);
    }
    sign = full.determinant() > 0 ? 1 : -1;
    return F;
  };
  Eigen::VectorXd xi = unit(k1), eta = unit(k2);
  int s1, s2;
  Eigen::MatrixXd F = frame(xi, s1), G = frame(eta, s2);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(num_edges, num_edges);
  for (int a = 0; a < k2; ++a) B(outer[a], 0) = eta(a);
  for (int a = 0; a < k1; ++a) B(inner[a], 1) = -xi(a);
  for (int c = 0; c < k1 - 1; ++c)
    for (int a = 0; a < k1; ++a) B(inner[a], 2 + c) = F(a, c);
  for (int c = 0; c < k2 - 1; ++c)
    for (int a = 0; a < k2; ++a) B(outer[a], 1 + k1 + c) = G(a, c);
  return (B.determinant() > 0 ? 1 : -1) * s1 * s2;
}

QuadraticReport quadratic_residual(const DecoratedGraph& g, const TestForm& phi, const QuadConfig& cfg,
                                   double face_radius) {
  g.require_simple_connected();
  const int d = g.dim(), m = g.num_edges();
  FormEngine eng(g);
  QuadraticReport rep;
  const int degree = required_test_form_degree(g, d) - 2;
  const bool trivial = degree < 0 || phi.is_zero() || m < 2;
  std::uint64_t sel = 0;
  if (!trivial) {
    if (phi.dim != d || phi.num_relative() != eng.num_relative())
      throw Error(ErrorKind::DegreeMismatch, "test form dimensions do not match the graph");
    sel = resolve_selection(phi, eng.num_wbar(), degree);
    rep.selections = 1;
  }
  const std::vector<cplx> k = phi.flat_momenta();
  auto laman = laman_subgraphs(g, d);
  std::vector<EdgeSubset> subsets;
  for (std::uint64_t b = 1; b + 1 < (std::uint64_t{1} << m); ++b) subsets.emplace_back(m, b);
  std::sort(subsets.begin(), subsets.end(), [](const EdgeSubset& a, const EdgeSubset& b) { return a.lex_less(b); });

  for (auto& sub : subsets) {
    QuadraticTerm term;
    term.subset = sub;
    term.laman = std::find(laman.begin(), laman.end(), sub) != laman.end();
    term.orientation = face_orientation(m, sub);
    term.parity_sign = (d + 1) % 2 == 0 ? 1 : permutation_sign(g, sub);
    if (!trivial) {
      auto inner = sub.indices(), outer = sub.complement().indices();
      const int k1 = static_cast<int>(inner.size()), k2 = static_cast<int>(outer.size());
      const int dim = (k1 - 1) + (k2 - 1);
      const double c = face_radius;
      auto integrand = [&](const double* u) {
        std::vector<double> xi(k1, 1.0), eta(k2, 1.0), t(m);
        double w = 1;
        if (k1 > 1) w *= sphere_from_cube(k1, u, xi.data());
        if (k2 > 1) w *= sphere_from_cube(k2, u + (k1 - 1), eta.data());
        if (w == 0) return cplx(0);
        for (int a = 0; a < k1; ++a) t[inner[a]] = c * xi[a];
        for (int b = 0; b < k2; ++b) t[outer[b]] = eta[b];
        cplx s = 0;
        for (int a = 0; a < k1; ++a)
          for (int b = 0; b < k2; ++b) {
            std::uint64_t rest1 = sub.bits() & ~bit(inner[a]);
            std::uint64_t rest2 = sub.complement().bits() & ~bit(outer[b]);
            double sign = koszul_sign(rest1, rest2) * ((a + b) % 2 ? -1.0 : 1.0);
            s += sign * xi[a] * eta[b] * eng.leading(rest1 | rest2, sel, t.data(), k);
          }
        return s * (w * std::pow(c, k1 - 1));
      };
      if (dim == 0) {
        term.value = integrand(nullptr);
      } else {
        auto r = integrate_box_complex(dim, integrand, std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0), cfg);
        term.value = r.value;
        term.error = r.error;
      }
    }
    if (term.laman) {
      rep.residual += double(term.orientation) * term.value;
      rep.max_term = std::max(rep.max_term, std::abs(term.value));
    } else {
      rep.non_laman_sum += double(term.orientation) * term.value;
    }
    rep.error += term.error;
    rep.terms.push_back(term);
  }
  rep.relative = rep.max_term > 0 ? std::abs(rep.residual) / rep.max_term : 0.0;
  return rep;
}

std::vector<double> outer_boundary_decay(const DecoratedGraph& g, const TestForm& phi, const std::vector<double>& Ls,
                                         const QuadConfig& cfg) {
  g.require_simple_connected();
  std::vector<double> out(Ls.size(), 0.0);
  const int degree = required_test_form_degree(g, g.dim()) - 1;
  if (degree < 0 || phi.is_zero()) return out;
  for (size_t i = 1; i < Ls.size(); ++i)
    if (!(Ls[i] > Ls[i - 1])) throw Error(ErrorKind::InvalidArgument, "L values must increase");
  FormEngine eng(g);
  if (phi.dim != eng.dim() || phi.num_relative() != eng.num_relative())
    throw Error(ErrorKind::DegreeMismatch, "test form dimensions do not match the graph");
  const int m = eng.num_edges();
  auto selections = all_selections(eng.num_wbar(), degree);
  const int ns = static_cast<int>(selections.size());
  for (size_t li = 0; li < Ls.size(); ++li) {
    const double L = Ls[li];
    double total = 0;
    for (int e = 0; e < m; ++e) {
      auto face = [&](const double* x, double* res) {
        std::vector<double> t(m);
        for (int a = 0, c = 0; a < m; ++a) t[a] = a == e ? L : x[c++];
        for (int s = 0; s < ns; ++s) {
          cplx v = eng.gaussian(eng.full_dt() & ~bit(e), selections[s], t.data(), phi);
          res[2 * s] = v.real();
          res[2 * s + 1] = v.imag();
        }
      };
      std::vector<double> vals(2 * ns);
      if (m == 1) {
        face(nullptr, vals.data());
      } else {
        vals = integrate_box(m - 1, 2 * ns, face, std::vector<double>(m - 1, 0.0), std::vector<double>(m - 1, L), cfg)
                   .value;
      }
      for (int s = 0; s < ns; ++s) total += std::hypot(vals[2 * s], vals[2 * s + 1]);
    }
    out[li] = total;
  }
  return out;
}

}  // namespace feyn
