#include "feyn/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include "feyn/amplitude.hpp"
#include "feyn/anomaly.hpp"
#include "feyn/errors.hpp"
#include "feyn/graph.hpp"
#include "feyn/graph_polynomials.hpp"
#include "json.hpp"

namespace feyn {

using nlohmann::json;

namespace {

// Thrown when a checked identity fails; maps to exit code 2.
struct CheckFailed {
  json report;
};

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

json exponents_json(const std::vector<int>& e) { return json(e); }

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

std::string render(const json& j, const std::string& format) {
  if (format == "json") return j.dump(2) + "\n";
  std::ostringstream o;
  if (format == "text") {
    for (auto& [k, v] : j.items()) o << k << ": " << scalar_text(v) << "\n";
    return o.str();
  }
  o << "key,value\n";
  for (auto& [k, v] : j.items()) {
    std::string s = scalar_text(v);
    bool quote = s.find_first_of(",\"\n") != std::string::npos;
    if (quote) {
      std::string esc;
      for (char c : s) esc += c == '"' ? std::string("\"\"") : std::string(1, c);
      s = "\"" + esc + "\"";
    }
    o << k << "," << s << "\n";
  }
  return o.str();
}

QuadConfig quad_config(const RunConfig& c, double default_rtol) {
  QuadConfig q;
  q.rtol = c.rtol.value_or(default_rtol);
  if (c.atol) q.atol = *c.atol;
  if (c.max_evals) q.max_evals = *c.max_evals;
  q.threads = c.threads;
  return q;
}

double parse_L(const std::string& s) {
  if (s == "inf" || s == "infinity") return INFINITY;
  try {
    size_t pos;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::Parse, "cannot parse L = '" + s + "'");
  }
}

DecoratedGraph load(const RunConfig& c) {
  if (c.graph_path.empty()) throw Error(ErrorKind::Parse, "--graph is required");
  DecoratedGraph g = load_graph(c.graph_path);
  if (c.d) {
    if (*c.d < 1) throw Error(ErrorKind::Parse, "--d must be positive");
    g = g.with_dim(*c.d);
  }
  return g;
}

TestForm load_phi(const RunConfig& c) {
  if (c.phi_path.empty()) throw Error(ErrorKind::Parse, "--phi is required");
  return load_test_form(c.phi_path);
}

json matrix_json(const Matrix<RationalFunction>& m) {
  json rows = json::array();
  for (auto& r : m) {
    json row = json::array();
    for (auto& x : r) row.push_back(x.to_string());
    rows.push_back(row);
  }
  return rows;
}

json cmd_classify(const RunConfig& c) {
  DecoratedGraph g = load(c);
  g.require_simple_connected();
  const int d = g.dim();
  auto v = is_laman(g, d);
  auto cert = anomaly_vanishes_exactly(g, d);
  json j;
  j["d"] = d;
  j["laman"] = v.laman;
  j["equality"] = v.equality_holds;
  j["witness"] = v.witness ? json(v.witness->to_string()) : json(nullptr);
  j["first_betti"] = first_betti(g);
  j["anomaly_vanishes"] = cert.vanishes;
  j["certificate"] = cert.describe();
  json subs = json::array();
  for (auto& s : laman_subgraphs(g, d)) subs.push_back(s.to_string());
  j["laman_subgraphs"] = subs;
  return j;
}

json cmd_kirchhoff(const RunConfig& c) {
  DecoratedGraph g = load(c);
  auto lap = weighted_laplacian(g);
  bool ok = kirchhoff_identity_holds(lap);
  json j;
  j["polynomial"] = lap.tree_polynomial.to_string();
  j["determinant"] = laplacian_determinant(lap).to_string();
  j["laplacian"] = matrix_json(lap.M);
  j["identity"] = ok ? "ok" : "FAILED";
  if (!ok) throw CheckFailed{j};
  return j;
}

json cmd_minverse(const RunConfig& c) {
  DecoratedGraph g = load(c);
  auto lap = weighted_laplacian(g);
  json j;
  try {
    auto inv = m_inverse(g, lap);
    j["denominator"] = inv.denominator.to_string();
    j["entries"] = matrix_json(inv.entries);
    j["identity"] = "ok";
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Assertion) throw;
    j["identity"] = "FAILED";
    throw CheckFailed{j};
  }
  return j;
}

json cmd_dinverse(const RunConfig& c) {
  DecoratedGraph g = load(c);
  json j;
  try {
    auto dinv = d_inverse(g);
    j["denominator"] = dinv.denominator.to_string();
    j["entries"] = matrix_json(dinv.entries);
    j["inclusion"] = "ok";
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Assertion) throw;
    j["inclusion"] = "FAILED";
    throw CheckFailed{j};
  }
  return j;
}

json cmd_corners(const RunConfig& c) {
  DecoratedGraph g = load(c);
  g.require_simple_connected();
  Polynomial k = kirchhoff_polynomial(g);
  const int m = g.num_edges();
  std::vector<EdgeSubset> subs;
  for (std::uint64_t b = 1; b < (std::uint64_t{1} << m); ++b)
    if (subset_connected(g, EdgeSubset(m, b))) subs.emplace_back(m, b);
  std::sort(subs.begin(), subs.end(), [](const EdgeSubset& a, const EdgeSubset& b) { return a.lex_less(b); });
  json rows = json::array();
  bool ok = true;
  for (auto& s : subs) {
    auto terms = corner_expand(k, s);
    json degrees = json::object();
    for (auto& t : terms) degrees[std::to_string(t.rho_degree)] = t.coefficient.to_string();
    int h1 = first_betti(g, s);
    bool match = !terms.empty() && terms.front().rho_degree == h1 && !terms.front().coefficient.is_zero();
    ok = ok && match;
    rows.push_back({{"subset", s.to_string()}, {"first_betti", h1}, {"min_degree", terms.front().rho_degree},
                    {"degrees", degrees}, {"match", match}});
  }
  json j;
  j["corners"] = rows;
  j["identity"] = ok ? "ok" : "FAILED";
  if (!ok) throw CheckFailed{j};
  return j;
}

json result_json(const IntegralResult& r, const std::string& method) {
  return {{"value", complex_json(r.value)}, {"error", r.error}, {"evaluations", r.evaluations}, {"method", method}};
}

json cmd_eval(const RunConfig& c, bool force_mc) {
  DecoratedGraph g = load(c);
  TestForm phi = load_phi(c);
  double L = parse_L(c.L);
  json j;
  if (c.mc || force_mc) {
    j = result_json(mc_oracle_W(g, phi, c.eps, L, c.samples, c.seed, c.threads), "monte-carlo");
    j["samples"] = c.samples;
    j["seed"] = c.seed;
  } else {
    EvalOptions opt;
    opt.short_circuit = c.short_circuit;
    bool cut = c.short_circuit && dimension_violation(g, g.dim()).has_value();
    j = result_json(evaluate_W(g, phi, c.eps, L, quad_config(c, 1e-6), opt), cut ? "short-circuit" : "cubature");
  }
  j["eps"] = c.eps;
  j["L"] = c.L;
  return j;
}

json cmd_anomaly(const RunConfig& c) {
  DecoratedGraph g = load(c);
  g.require_simple_connected();
  json j;
  auto cert = anomaly_vanishes_exactly(g, g.dim());
  j["vanishes"] = cert.vanishes;
  j["certificate"] = cert.describe();
  if (!is_laman(g, g.dim()).laman) {
    j["laman"] = false;
    return j;
  }
  j["laman"] = true;
  auto sym = anomaly_symbol(g, quad_config(c, 1e-7));
  j["order"] = sym.order;
  j["form_degree"] = sym.form_degree;
  j["error"] = sym.error;
  json blocks = json::array();
  for (auto& b : sym.blocks) {
    json coeffs = json::array();
    for (auto& [ex, v] : b.coefficients)
      coeffs.push_back({{"exponents", exponents_json(ex)}, {"value", v}, {"error", b.errors.at(ex)}});
    json sel = json::array();
    for (int i = 0; i < 64; ++i)
      if ((b.selection >> i) & 1) sel.push_back({i / sym.dim + 1, i % sym.dim + 1});
    blocks.push_back({{"selection", sel}, {"coefficients", coeffs}});
  }
  j["symbol"] = blocks;
  if (!c.phi_path.empty()) j["applied"] = complex_json(o_apply(sym, load_phi(c)));
  return j;
}

json cmd_quadratic(const RunConfig& c) {
  DecoratedGraph g = load(c);
  TestForm phi = load_phi(c);
  auto rep = quadratic_residual(g, phi, quad_config(c, 1e-7), c.face_radius);
  json terms = json::array();
  for (auto& t : rep.terms)
    terms.push_back({{"subset", t.subset.to_string()},
                     {"laman", t.laman},
                     {"orientation", t.orientation},
                     {"parity_sign", t.parity_sign},
                     {"value", complex_json(t.value)},
                     {"error", t.error}});
  json j;
  j["terms"] = terms;
  j["residual"] = complex_json(rep.residual);
  j["residual_abs"] = std::abs(rep.residual);
  j["max_term"] = rep.max_term;
  j["relative"] = rep.relative;
  j["non_laman_sum"] = complex_json(rep.non_laman_sum);
  j["quadrature_error"] = rep.error;
  j["tolerance"] = c.tol;
  bool ok = rep.relative < c.tol;
  j["status"] = ok ? "ok" : "FAILED";
  if (!ok) throw CheckFailed{j};
  return j;
}

json cmd_boundary_decay(const RunConfig& c) {
  DecoratedGraph g = load(c);
  TestForm phi = load_phi(c);
  auto mags = outer_boundary_decay(g, phi, c.Ls, quad_config(c, 1e-7));
  bool decreasing = true;
  for (size_t i = 1; i < mags.size(); ++i) decreasing = decreasing && mags[i] < mags[i - 1];
  bool small = mags.empty() || mags.back() < 0.1 * mags.front();
  bool all_zero = std::all_of(mags.begin(), mags.end(), [](double x) { return x == 0; });
  json j;
  j["L"] = c.Ls;
  j["magnitudes"] = mags;
  j["decreasing"] = decreasing;
  j["below_tenth"] = small;
  bool ok = all_zero || (decreasing && small);
  j["status"] = ok ? "ok" : "FAILED";
  if (!ok) throw CheckFailed{j};
  return j;
}

}  // namespace

RunResult run(const RunConfig& c) {
  RunResult r;
  if (c.output != "json" && c.output != "csv" && c.output != "text") {
    r.exit_code = 1;
    r.error = "unknown output format '" + c.output + "'";
    return r;
  }
  try {
    json j;
    const std::string& cmd = c.command;
    if (cmd == "classify")
      j = cmd_classify(c);
    else if (cmd == "kirchhoff")
      j = cmd_kirchhoff(c);
    else if (cmd == "minverse")
      j = cmd_minverse(c);
    else if (cmd == "dinverse")
      j = cmd_dinverse(c);
    else if (cmd == "corners")
      j = cmd_corners(c);
    else if (cmd == "eval")
      j = cmd_eval(c, false);
    else if (cmd == "mc-oracle")
      j = cmd_eval(c, true);
    else if (cmd == "anomaly")
      j = cmd_anomaly(c);
    else if (cmd == "quadratic-check")
      j = cmd_quadratic(c);
    else if (cmd == "boundary-decay")
      j = cmd_boundary_decay(c);
    else
      throw Error(ErrorKind::Parse, "unknown command '" + cmd + "'");
    j["command"] = cmd;
    r.output = render(j, c.output);
  } catch (const CheckFailed& f) {
    json j = f.report;
    j["command"] = c.command;
    r.output = render(j, c.output);
    r.exit_code = 2;
    r.error = "identity check failed";
  } catch (const Error& e) {
    r.error = e.what();
    r.exit_code = e.kind() == ErrorKind::Assertion ? 2 : e.kind() == ErrorKind::NonConvergence ? 3 : 1;
  }
  return r;
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Holomorphic Feynman graph integrals: graph polynomials, Schwinger integrals, anomalies"};
  app.require_subcommand(1);
  RunConfig cfg;
  if (const char* env = std::getenv("FEYN_THREADS")) {
    try {
      cfg.threads = std::max(1, std::stoi(env));
    } catch (const std::exception&) {
    }
  }
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"classify", "Laman verdict, witness and vanishing certificate"},
      {"kirchhoff", "Kirchhoff polynomial and determinant identity"},
      {"minverse", "cut-formula inverse of the weighted Laplacian"},
      {"dinverse", "d^-1 entries and numerator inclusion"},
      {"corners", "rho-degree table per connected subgraph"},
      {"eval", "evaluate the regularized graph integral"},
      {"mc-oracle", "Monte-Carlo estimate of the graph integral"},
      {"anomaly", "anomaly operator symbol"},
      {"quadratic-check", "quadratic relation residual"},
      {"boundary-decay", "outer boundary magnitudes for increasing L"}};
  for (auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--graph", cfg.graph_path, "graph file")->required();
    sub->add_option("--d", cfg.d, "dimension override");
    sub->add_option("--output", cfg.output, "json | csv | text")->capture_default_str();
    sub->add_option("--threads", cfg.threads, "worker threads (default $FEYN_THREADS or 1)");
    sub->add_option("--rtol", cfg.rtol, "relative tolerance");
    sub->add_option("--atol", cfg.atol, "absolute tolerance");
    sub->add_option("--max-evals", cfg.max_evals, "integrand evaluation budget");
    if (name == "eval" || name == "mc-oracle" || name == "anomaly" || name == "quadratic-check" ||
        name == "boundary-decay")
      sub->add_option("--phi", cfg.phi_path, "test form JSON");
    if (name == "eval" || name == "mc-oracle") {
      sub->add_option("--eps", cfg.eps, "lower Schwinger cutoff")->capture_default_str();
      sub->add_option("--L", cfg.L, "upper Schwinger cutoff (or inf)")->capture_default_str();
      sub->add_option("--samples", cfg.samples, "Monte-Carlo samples")->capture_default_str();
      sub->add_option("--seed", cfg.seed, "Monte-Carlo seed")->capture_default_str();
    }
    if (name == "eval") {
      sub->add_flag("--mc", cfg.mc, "use the Monte-Carlo oracle");
      sub->add_flag("!--no-short-circuit", cfg.short_circuit, "integrate even when the dimension count vanishes");
    }
    if (name == "quadratic-check") {
      sub->add_option("--tol", cfg.tol, "relative residual tolerance")->capture_default_str();
      sub->add_option("--face-radius", cfg.face_radius, "distance to the faces")->capture_default_str();
    }
    if (name == "boundary-decay") sub->add_option("--Ls", cfg.Ls, "increasing L values")->delimiter(',');
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  RunResult r = run(cfg);
  std::cout << r.output;
  if (!r.error.empty()) std::cerr << "error: " << r.error << "\n";
  return r.exit_code;
}

}  // namespace feyn
