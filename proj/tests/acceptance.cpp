// One line per acceptance criterion: "criterion N: PASS|FAIL <detail>".
#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "corpus.hpp"
#include "feyn/amplitude.hpp"
#include "feyn/anomaly.hpp"
#include "feyn/errors.hpp"
#include "feyn/graph.hpp"
#include "feyn/graph_polynomials.hpp"

using namespace feyn;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

const std::vector<DecoratedGraph>& corpus_d1() {
  static const auto c = corpus::full(1);
  return c;
}

// ---------------------------------------------------------------- exact identities

Outcome kirchhoff_identity() {
  int bad = 0;
  for (auto& g : corpus_d1())
    if (!kirchhoff_identity_holds(weighted_laplacian(g))) ++bad;
  return {bad == 0, std::to_string(corpus_d1().size()) + " graphs, " + std::to_string(bad) + " mismatches"};
}

Outcome inverse_identity() {
  int bad = 0;
  for (auto& g : corpus_d1()) {
    auto lap = weighted_laplacian(g);
    try {
      if (!inverse_identity_holds(lap, m_inverse(g, lap))) ++bad;
    } catch (const Error&) {
      ++bad;
    }
  }
  return {bad == 0, std::to_string(corpus_d1().size()) + " graphs, " + std::to_string(bad) + " mismatches"};
}

Outcome d_inverse_bound() {
  int symbolic_bad = 0;
  double worst = 0;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> log_t(-3, 3);
  for (auto& g : corpus_d1()) {
    try {
      if (!numerator_inclusion_holds(g, d_inverse(g))) ++symbolic_bad;
    } catch (const Error&) {
      ++symbolic_bad;
    }
    Eigen::MatrixXd rho = incidence_eigen(g);
    Eigen::VectorXd t(g.num_edges());
    for (int s = 0; s < 1000; ++s) {
      for (int e = 0; e < t.size(); ++e) t(e) = std::pow(10.0, log_t(rng));
      worst = std::max(worst, d_inverse_numeric(rho, t).cwiseAbs().maxCoeff());
    }
  }
  bool ok = symbolic_bad == 0 && worst <= 2 + 1e-12;
  return {ok, "inclusion failures " + std::to_string(symbolic_bad) + ", max |d^-1| " + fmt("%.6f", worst)};
}

Outcome corner_degree() {
  long checked = 0, bad = 0;
  for (auto& g : corpus_d1()) {
    Polynomial k = kirchhoff_polynomial(g);
    const int m = g.num_edges();
    for (std::uint64_t b = 1; b < (std::uint64_t{1} << m); ++b) {
      EdgeSubset s(m, b);
      if (!subset_connected(g, s)) continue;
      ++checked;
      auto terms = corner_expand(k, s);
      if (terms.empty() || terms.front().rho_degree != first_betti(g, s) || terms.front().coefficient.is_zero()) ++bad;
    }
  }
  return {bad == 0, std::to_string(checked) + " connected subsets, " + std::to_string(bad) + " mismatches"};
}

// ---------------------------------------------------------------- Laman classifier

// Independent check over vertex subsets: the worst edge set on a vertex set is the induced one.
bool laman_by_vertex_subsets(const DecoratedGraph& g, int d) {
  const int n = g.num_vertices();
  if (!g.is_connected() || g.has_self_loop()) return false;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    int induced = 0;
    for (auto& e : g.edges())
      if ((mask >> (e.tail - 1) & 1) && (mask >> (e.head - 1) & 1)) ++induced;
    if (induced == 0) continue;
    if (d * std::popcount(mask) < (d - 1) * induced + d + 1) return false;
  }
  return d * n == (d - 1) * g.num_edges() + d + 1;
}

// (2,3) pebble game: accepts an edge when 4 pebbles can be gathered on its ends.
bool tight_23(const DecoratedGraph& g) {
  const int n = g.num_vertices();
  std::vector<int> pebbles(n + 1, 2);
  std::vector<std::vector<int>> out(n + 1);  // directed edges as head lists
  // Moves one free pebble from a vertex other than a, b to root by reversing a directed path.
  auto pull = [&](int root, int a, int b) {
    std::vector<int> parent(n + 1, -1);
    std::vector<int> stack{root};
    parent[root] = root;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      if (v != a && v != b && pebbles[v] > 0) {
        --pebbles[v];
        ++pebbles[root];
        for (int w = v; w != root; w = parent[w]) {
          int u = parent[w];
          auto& lst = out[u];
          lst.erase(std::find(lst.begin(), lst.end(), w));
          out[w].push_back(u);
        }
        return true;
      }
      for (int w : out[v])
        if (parent[w] < 0) {
          parent[w] = v;
          stack.push_back(w);
        }
    }
    return false;
  };
  int accepted = 0;
  for (auto& e : g.edges()) {
    const int a = e.tail, b = e.head;
    bool ok = true;
    while (ok && pebbles[a] + pebbles[b] < 4) ok = (pebbles[a] < 2 && pull(a, a, b)) || (pebbles[b] < 2 && pull(b, a, b));
    if (!ok) return false;  // the edge is dependent
    --pebbles[a];
    out[a].push_back(b);
    ++accepted;
  }
  return accepted == 2 * n - 3;
}

Outcome laman_classifier() {
  int bad = 0, tight_bad = 0, lamans = 0;
  for (int d : {1, 2, 3}) {
    for (auto& g : corpus::full(d)) {
      bool v = is_laman(g, d).laman;
      lamans += v;
      if (v != laman_by_vertex_subsets(g, d)) ++bad;
      if (d == 2 && v != tight_23(g)) ++tight_bad;
    }
  }
  return {bad == 0 && tight_bad == 0, "brute-force mismatches " + std::to_string(bad) + ", (2,3)-tight mismatches " +
                                          std::to_string(tight_bad) + ", Laman graphs seen " + std::to_string(lamans)};
}

// ---------------------------------------------------------------- amplitudes

Outcome single_edge_anchor() {
  // Pairing of 1/(pi w) with exp(-a|w|^2 + k w - conj(k) wbar) (c0 + c1 wbar) over the plane,
  // summed term by term in the angular Fourier series.
  TestForm phi = corpus::generic_form(1, 1, 0.9);
  phi.momenta = {{cplx(0.7, -0.3)}};
  const cplx c0(1.0, 0.0), c1(0.4, -0.25);
  phi.polynomial = {{c0, {0}}, {c1, {1}}};
  const cplx k = phi.momenta[0][0], kb = std::conj(k);
  const double a = phi.width;
  const cplx x = k * kb / a, ex = std::exp(-x);
  const cplx base = (1.0 - ex) / kb;
  // wbar insertion acts as -d/d(conj k) on the plane-wave pairing
  const cplx with_wbar = -((k / a) * ex / kb - (1.0 - ex) / (kb * kb));
  const cplx expected = c0 * base + c1 * with_wbar;
  QuadConfig cfg;
  cfg.rtol = 1e-8;
  auto r = evaluate_W(corpus::single_edge(1), phi, 0.0, INFINITY, cfg);
  double rel = std::abs(r.value - expected) / std::abs(expected);
  return {rel < 1e-3, "relative error " + fmt("%.3e", rel)};
}

Outcome oracle_agreement() {
  struct Case {
    DecoratedGraph g;
    std::string phi;
  };
  std::vector<Case> cases = {{corpus::single_edge(1), "data/phi/two_vertex_d1.json"},
                             {corpus::bigon(1), "data/phi/two_vertex_d1.json"},
                             {corpus::triangle(1), "data/phi/three_vertex_d1.json"}};
  bool ok = true;
  std::ostringstream detail;
  QuadConfig cfg;
  cfg.rtol = 1e-8;
  cfg.atol = 1e-14;
  for (size_t i = 0; i < cases.size(); ++i) {
    TestForm phi = load_test_form(corpus::data_path(cases[i].phi));
    auto q = evaluate_W(cases[i].g, phi, 0.1, 1.0, cfg);
    auto mc = mc_oracle_W(cases[i].g, phi, 0.1, 1.0, 1000000, 2024 + i);
    double se = std::hypot(mc.error, q.error);
    double z = std::abs(q.value - mc.value) / se;
    ok = ok && z < 3;
    detail << (i ? ", " : "") << fmt("%.2f", z) << " SE";
  }
  return {ok, detail.str()};
}

Outcome dimension_vanishing() {
  int checked = 0, bad = 0;
  double worst = 0;
  QuadConfig cfg;
  cfg.atol = 1e-10;
  for (int d : {2, 3}) {
    for (auto& g : corpus::exhaustive(d)) {
      if (!dimension_violation(g, d)) continue;
      ++checked;
      TestForm phi = corpus::generic_form(d, g.num_vertices() - 1);
      auto cut = evaluate_W(g, phi, 0.1, 1.0, cfg);
      EvalOptions direct;
      direct.short_circuit = false;
      auto full = evaluate_W(g, phi, 0.1, 1.0, cfg, direct);
      worst = std::max(worst, std::abs(full.value));
      if (cut.value != cplx(0, 0) || cut.evaluations != 0 || std::abs(full.value) >= 1e-6) ++bad;
    }
  }
  return {bad == 0 && checked > 0,
          std::to_string(checked) + " violating graphs (d=2,3), max direct |W| " + fmt("%.1e", worst)};
}

// ---------------------------------------------------------------- anomalies

Outcome non_laman_vanishing() {
  int nonlaman = 0, bad = 0;
  double worst = 0;
  QuadConfig cfg;
  cfg.rtol = 1e-6;
  cfg.atol = 1e-9;  // well below the 1e-6 decision threshold
  for (int d : {1, 2}) {
    for (auto& g : corpus::full(d)) {
      if (is_laman(g, d).laman) continue;
      ++nonlaman;
      auto cert = anomaly_vanishes_exactly(g, d);
      auto mag = boundary_magnitude(g, corpus::generic_form(d, g.num_vertices() - 1), 1e-8, cfg);
      worst = std::max(worst, mag.magnitude);
      if (cert.vanishes != (mag.magnitude < 1e-6)) ++bad;
    }
  }
  // contrast: anchor Laman graphs stay well above the threshold
  double bigon = boundary_magnitude(corpus::bigon(1), corpus::generic_form(1, 1), 1e-8, cfg).magnitude;
  double tri = boundary_magnitude(corpus::triangle(2), corpus::generic_form(2, 2), 1e-8, cfg).magnitude;
  bool contrast = bigon > 1e-6 && tri > 1e-6;
  return {bad == 0 && contrast, std::to_string(nonlaman) + " non-Laman (max " + fmt("%.1e", worst) + "), " +
                                    std::to_string(bad) + " disagreements; Laman bigon d=1 " + fmt("%.2e", bigon) +
                                    ", triangle d=2 " + fmt("%.2e", tri)};
}

Outcome quadratic_relations() {
  QuadConfig cfg;
  cfg.rtol = 1e-9;
  cfg.atol = 1e-15;
  auto tri = quadratic_residual(corpus::triangle(1), load_test_form(corpus::data_path("data/phi/three_vertex_d1.json")),
                                cfg);
  auto big = quadratic_residual(corpus::bigon(1), load_test_form(corpus::data_path("data/phi/two_vertex_d1.json")), cfg);
  bool ok = tri.relative < 1e-4 && tri.max_term > 0 && big.relative < 1e-4;
  return {ok, "triangle relative " + fmt("%.2e", tri.relative) + " (max term " + fmt("%.3f", tri.max_term) +
                  "), bigon relative " + fmt("%.2e", big.relative) + " (max term " + fmt("%.1e", big.max_term) + ")"};
}

Outcome boundary_boundedness() {
  int graphs = 0, bad = 0;
  for (int d : {1, 2}) {
    for (auto& g : corpus::full(d)) {
      auto f = wick_reduce(g, corpus::generic_form(d, g.num_vertices() - 1));
      if (f.is_zero()) continue;
      ++graphs;
      const int m = g.num_edges();
      std::mt19937_64 rng(31 + graphs);
      std::normal_distribution<double> normal(0, 1);
      for (int ray = 0; ray < 100; ++ray) {
        std::vector<double> xi(m);
        double n2 = 0;
        for (auto& x : xi) {
          x = std::abs(normal(rng)) + 1e-3;
          n2 += x * x;
        }
        for (auto& x : xi) x /= std::sqrt(n2);
        // rho^(m-1) from the chart Jacobian; the limit along the ray must exist
        std::vector<cplx> vals;
        double sup = 0;
        for (int p = 1; p <= 12; ++p) {
          double r = std::pow(10.0, -p);
          std::vector<double> t(m);
          for (int e = 0; e < m; ++e) t[e] = r * xi[e];
          cplx v = f(t.data()) * std::pow(r, m - 1);
          vals.push_back(v);
          sup = std::max(sup, std::abs(v));
        }
        bool finite = std::isfinite(sup);
        bool settles = std::abs(vals[11] - vals[10]) <= 1e-6 * sup + 1e-300;
        if (!finite || !settles) {
          ++bad;
          break;
        }
      }
    }
  }
  return {bad == 0, std::to_string(graphs) + " graphs x 100 rays, " + std::to_string(bad) + " unbounded"};
}

Outcome outer_decay() {
  QuadConfig cfg;
  cfg.rtol = 1e-7;
  cfg.atol = 1e-14;
  const std::vector<double> Ls{1, 2, 4, 8};
  struct Case {
    std::string name;
    DecoratedGraph g;
    std::string phi;
  };
  std::vector<Case> cases = {{"single edge", corpus::single_edge(2), "data/phi/two_vertex_d2.json"},
                             {"triangle", corpus::triangle(2), "data/phi/three_vertex_d2.json"}};
  bool ok = true;
  std::ostringstream detail;
  for (auto& c : cases) {
    auto mags = outer_boundary_decay(c.g, load_test_form(corpus::data_path(c.phi)), Ls, cfg);
    bool decreasing = true;
    for (size_t i = 1; i < mags.size(); ++i) decreasing = decreasing && mags[i] < mags[i - 1];
    double ratio = mags.back() / mags.front();
    ok = ok && decreasing && ratio < 0.1;
    detail << c.name << " d=2 L=8/L=1 " << fmt("%.3f", ratio) << (decreasing ? "" : " (not decreasing)") << "; ";
  }
  // d = 1 decays like 1/L, so the ratio approaches 1/8; shown for reference only
  auto d1 = outer_boundary_decay(corpus::triangle(1), load_test_form(corpus::data_path("data/phi/three_vertex_d1.json")),
                                 Ls, cfg);
  detail << "triangle d=1 ratio " << fmt("%.3f", d1.back() / d1.front()) << " (reference)";
  return {ok, detail.str()};
}

}  // namespace

int main() {
  std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
      {1, kirchhoff_identity},   {2, inverse_identity},     {3, d_inverse_bound},         {4, corner_degree},
      {5, laman_classifier},     {6, single_edge_anchor},   {7, oracle_agreement},        {8, dimension_vanishing},
      {9, non_laman_vanishing},  {10, quadratic_relations}, {11, boundary_boundedness},    {12, outer_decay}};
  int failures = 0;
  for (auto& [id, run] : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += !o.pass;
    std::printf("criterion %d: %s  %s  [%.1fs]\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
