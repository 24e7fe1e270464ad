#include "feyn/graph.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <numeric>
#include <sstream>

#include "feyn/errors.hpp"

namespace feyn {

const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::SelfLoop: return "SelfLoop";
    case ErrorKind::Disconnected: return "Disconnected";
    case ErrorKind::EmptySubset: return "EmptySubset";
    case ErrorKind::EmptyEdgeSet: return "EmptyEdgeSet";
    case ErrorKind::OverlappingVertexSets: return "OverlappingVertexSets";
    case ErrorKind::VariableMismatch: return "VariableMismatch";
    case ErrorKind::GeneratorMismatch: return "GeneratorMismatch";
    case ErrorKind::ConstraintViolated: return "ConstraintViolated";
    case ErrorKind::NonPositiveT: return "NonPositiveT";
    case ErrorKind::NonPositiveEpsilon: return "NonPositiveEpsilon";
    case ErrorKind::CoincidentPoints: return "CoincidentPoints";
    case ErrorKind::DegreeMismatch: return "DegreeMismatch";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::NotLaman: return "NotLaman";
    case ErrorKind::Assertion: return "AssertionFailure";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Error";
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[std::max(a, b)] = std::min(a, b);
    return true;
  }
};

// Next bit pattern with the same popcount (Gosper).
std::uint64_t next_combination(std::uint64_t x) {
  std::uint64_t c = x & (~x + 1);
  std::uint64_t r = x + c;
  return (((r ^ x) >> 2) / c) | r;
}

template <class F>
void for_each_combination(int n, int k, F&& f) {
  if (k < 0 || k > n) return;
  if (k == 0) {
    f(std::uint64_t{0});
    return;
  }
  const std::uint64_t limit = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n);
  for (std::uint64_t x = (std::uint64_t{1} << k) - 1; x < limit && x != 0; x = next_combination(x)) {
    f(x);
    if (n < 64 && x >= limit) break;
  }
}

std::uint64_t touched_mask(const DecoratedGraph& g, std::uint64_t edges) {
  std::uint64_t m = 0;
  for (int e = 0; e < g.num_edges(); ++e)
    if ((edges >> e) & 1u) {
      m |= std::uint64_t{1} << (g.edge(e).tail - 1);
      m |= std::uint64_t{1} << (g.edge(e).head - 1);
    }
  return m;
}

std::string trim(const std::string& s) {
  auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

int parse_int(const std::string& tok, int line) {
  try {
    size_t pos = 0;
    int v = std::stoi(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::Parse, "line " + std::to_string(line) + ": expected integer, got '" + tok + "'");
  }
}

}  // namespace

// ---------------------------------------------------------------- EdgeSubset

EdgeSubset::EdgeSubset(int num_edges, std::uint64_t bits) : n_(num_edges), bits_(bits) {
  if (num_edges < 0 || num_edges > 64) throw Error(ErrorKind::InvalidArgument, "edge subset size out of range");
  if (num_edges < 64 && (bits >> num_edges) != 0)
    throw Error(ErrorKind::InvalidArgument, "edge subset index out of range");
}

EdgeSubset EdgeSubset::full(int num_edges) {
  return EdgeSubset(num_edges, num_edges == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << num_edges) - 1);
}

EdgeSubset EdgeSubset::of(int num_edges, const std::vector<int>& edges) {
  std::uint64_t b = 0;
  for (int e : edges) {
    if (e < 0 || e >= num_edges) throw Error(ErrorKind::InvalidArgument, "edge index out of range");
    b |= std::uint64_t{1} << e;
  }
  return EdgeSubset(num_edges, b);
}

int EdgeSubset::size() const { return std::popcount(bits_); }

std::vector<int> EdgeSubset::indices() const {
  std::vector<int> out;
  for (int e = 0; e < n_; ++e)
    if (contains(e)) out.push_back(e);
  return out;
}

EdgeSubset EdgeSubset::complement() const { return EdgeSubset(n_, full(n_).bits_ & ~bits_); }

std::string EdgeSubset::to_string() const {
  std::string s = "{";
  bool first = true;
  for (int e : indices()) {
    if (!first) s += ",";
    s += std::to_string(e + 1);
    first = false;
  }
  return s + "}";
}

bool EdgeSubset::lex_less(const EdgeSubset& o) const {
  auto a = indices(), b = o.indices();
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// ------------------------------------------------------------ DecoratedGraph

DecoratedGraph::DecoratedGraph(int dim, int num_vertices, std::vector<Edge> edges)
    : dim_(dim), nv_(num_vertices), edges_(std::move(edges)) {
  if (dim_ < 1) throw Error(ErrorKind::InvalidArgument, "dimension must be positive");
  if (nv_ < 1 || nv_ > 63) throw Error(ErrorKind::InvalidArgument, "vertex count must be in 1..63");
  if (edges_.size() > 64) throw Error(ErrorKind::InvalidArgument, "at most 64 edges supported");
  for (auto& e : edges_) {
    if (e.tail < 1 || e.tail > nv_ || e.head < 1 || e.head > nv_)
      throw Error(ErrorKind::InvalidArgument, "edge endpoint out of range");
    if (e.decoration.empty()) e.decoration.assign(dim_, 0);
    if (static_cast<int>(e.decoration.size()) != dim_)
      throw Error(ErrorKind::InvalidArgument, "decoration length differs from dim");
    for (int x : e.decoration)
      if (x < 0) throw Error(ErrorKind::InvalidArgument, "negative decoration");
  }
}

int DecoratedGraph::decoration_total() const {
  int s = 0;
  for (auto& e : edges_)
    for (int x : e.decoration) s += x;
  return s;
}

bool DecoratedGraph::has_self_loop() const {
  return std::any_of(edges_.begin(), edges_.end(), [](const Edge& e) { return e.tail == e.head; });
}

int DecoratedGraph::num_components() const {
  UnionFind uf(nv_);
  int c = nv_;
  for (auto& e : edges_)
    if (uf.unite(e.tail - 1, e.head - 1)) --c;
  return c;
}

bool DecoratedGraph::is_connected() const { return num_components() == 1; }

void DecoratedGraph::require_simple_connected() const {
  if (has_self_loop()) throw Error(ErrorKind::SelfLoop, "graph has a self-loop");
  if (!is_connected()) throw Error(ErrorKind::Disconnected, "graph is not connected");
}

DecoratedGraph DecoratedGraph::with_dim(int d) const {
  if (d == dim_) return *this;
  std::vector<Edge> es = edges_;
  for (auto& e : es) e.decoration.assign(d, 0);
  return DecoratedGraph(d, nv_, es);
}

DecoratedGraph DecoratedGraph::restricted(const EdgeSubset& sub) const {
  std::vector<Edge> es;
  for (int e : sub.indices()) es.push_back(edges_[e]);
  return DecoratedGraph(dim_, nv_, es);
}

// ------------------------------------------------------------------- parsing

DecoratedGraph parse_graph(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  int dim = -1, nv = -1;
  std::vector<Edge> edges;
  while (std::getline(in, raw)) {
    ++line_no;
    auto hash = raw.find('#');
    std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string kw;
    ls >> kw;
    std::vector<std::string> toks;
    for (std::string t; ls >> t;) toks.push_back(t);
    auto where = "line " + std::to_string(line_no) + ": ";
    if (kw == "dim") {
      if (toks.size() != 1) throw Error(ErrorKind::Parse, where + "dim takes one value");
      dim = parse_int(toks[0], line_no);
      if (dim < 1) throw Error(ErrorKind::Parse, where + "dim must be positive");
    } else if (kw == "vertices") {
      if (toks.size() != 1) throw Error(ErrorKind::Parse, where + "vertices takes one value");
      nv = parse_int(toks[0], line_no);
      if (nv < 1 || nv > 63) throw Error(ErrorKind::Parse, where + "vertex count must be in 1..63");
    } else if (kw == "edge") {
      if (dim < 0 || nv < 0) throw Error(ErrorKind::Parse, where + "dim and vertices must precede edges");
      if (toks.size() < 2 || toks.size() > 3) throw Error(ErrorKind::Parse, where + "edge takes: tail head [n=..]");
      Edge e;
      e.tail = parse_int(toks[0], line_no);
      e.head = parse_int(toks[1], line_no);
      if (e.tail < 1 || e.tail > nv || e.head < 1 || e.head > nv)
        throw Error(ErrorKind::Parse, where + "vertex index out of range");
      if (toks.size() == 3) {
        if (toks[2].rfind("n=", 0) != 0) throw Error(ErrorKind::Parse, where + "expected n=...");
        std::string list = toks[2].substr(2);
        std::istringstream ds(list);
        for (std::string item; std::getline(ds, item, ',');) {
          int v = parse_int(item, line_no);
          if (v < 0) throw Error(ErrorKind::Parse, where + "decorations must be non-negative");
          e.decoration.push_back(v);
        }
        if (static_cast<int>(e.decoration.size()) != dim)
          throw Error(ErrorKind::Parse, where + "decoration length " + std::to_string(e.decoration.size()) +
                                            " does not match dim " + std::to_string(dim));
      } else {
        e.decoration.assign(dim, 0);
      }
      edges.push_back(e);
      if (edges.size() > 64) throw Error(ErrorKind::Parse, where + "at most 64 edges supported");
    } else {
      throw Error(ErrorKind::Parse, where + "unknown statement '" + kw + "'");
    }
  }
  if (dim < 0) throw Error(ErrorKind::Parse, "missing dim");
  if (nv < 0) throw Error(ErrorKind::Parse, "missing vertices");
  return DecoratedGraph(dim, nv, edges);
}

DecoratedGraph load_graph(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::Parse, "cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_graph(ss.str());
}

std::string format_graph(const DecoratedGraph& g) {
  std::ostringstream o;
  o << "dim " << g.dim() << "\nvertices " << g.num_vertices() << "\n";
  for (auto& e : g.edges()) {
    o << "edge " << e.tail << " " << e.head << " n=";
    for (size_t i = 0; i < e.decoration.size(); ++i) o << (i ? "," : "") << e.decoration[i];
    o << "\n";
  }
  return o.str();
}

// ---------------------------------------------------------------- incidence

std::vector<std::vector<int>> incidence_matrix(const DecoratedGraph& g) {
  g.require_simple_connected();
  const int n = g.num_vertices();
  std::vector<std::vector<int>> rho(g.num_edges(), std::vector<int>(n - 1, 0));
  for (int e = 0; e < g.num_edges(); ++e) {
    const auto& ed = g.edge(e);
    if (ed.head < n) rho[e][ed.head - 1] += 1;
    if (ed.tail < n) rho[e][ed.tail - 1] -= 1;
  }
  return rho;
}

int touched_vertex_count(const DecoratedGraph& g, const EdgeSubset& sub) {
  return std::popcount(touched_mask(g, sub.bits()));
}

int component_count(const DecoratedGraph& g, const EdgeSubset& sub) {
  UnionFind uf(g.num_vertices());
  int c = touched_vertex_count(g, sub);
  for (int e : sub.indices())
    if (uf.unite(g.edge(e).tail - 1, g.edge(e).head - 1)) --c;
  return c;
}

bool subset_connected(const DecoratedGraph& g, const EdgeSubset& sub) {
  return !sub.empty() && component_count(g, sub) == 1;
}

int first_betti(const DecoratedGraph& g, const EdgeSubset& sub) {
  if (sub.empty()) throw Error(ErrorKind::EmptyEdgeSet, "first_betti of an empty edge set");
  return sub.size() - touched_vertex_count(g, sub) + component_count(g, sub);
}

int first_betti(const DecoratedGraph& g) { return first_betti(g, EdgeSubset::full(g.num_edges())); }

// -------------------------------------------------------------------- Laman

bool laman_inequality(int d, int vertices, int edges) { return d * vertices >= (d - 1) * edges + d + 1; }

namespace {

// Worst violating edge-generated subgraph inside `within`, if any. For a fixed
// touched vertex set the induced edges are the most violating choice, so
// scanning vertex subsets is exhaustive.
std::optional<EdgeSubset> find_violation(const DecoratedGraph& g, std::uint64_t within, int d) {
  const int n = g.num_vertices();
  if (d == 1) return std::nullopt;  // |V'| >= 2 for every nonempty edge set
  const std::uint64_t vmask_all = touched_mask(g, within);
  std::vector<int> verts;
  for (int v = 0; v < n; ++v)
    if ((vmask_all >> v) & 1u) verts.push_back(v);
  const int k = static_cast<int>(verts.size());
  for (std::uint64_t pick = 1; pick < (std::uint64_t{1} << k); ++pick) {
    std::uint64_t vm = 0;
    for (int i = 0; i < k; ++i)
      if ((pick >> i) & 1u) vm |= std::uint64_t{1} << verts[i];
    std::uint64_t em = 0;
    for (int e = 0; e < g.num_edges(); ++e) {
      if (!((within >> e) & 1u)) continue;
      const auto& ed = g.edge(e);
      if (((vm >> (ed.tail - 1)) & 1u) && ((vm >> (ed.head - 1)) & 1u)) em |= std::uint64_t{1} << e;
    }
    if (em == 0) continue;
    if (touched_mask(g, em) != vm) continue;  // checked at its own touched set
    if (!laman_inequality(d, std::popcount(vm), std::popcount(em))) return EdgeSubset(g.num_edges(), em);
  }
  return std::nullopt;
}

}  // namespace

LamanVerdict is_laman(const DecoratedGraph& g, int d) {
  if (d < 1) throw Error(ErrorKind::InvalidArgument, "d must be positive");
  g.require_simple_connected();
  LamanVerdict v;
  const int n = g.num_vertices(), m = g.num_edges();
  v.equality_holds = m > 0 && d * n == (d - 1) * m + d + 1;
  v.witness = find_violation(g, EdgeSubset::full(m).bits(), d);
  v.laman = v.equality_holds && !v.witness;
  return v;
}

bool laman_subset(const DecoratedGraph& g, const EdgeSubset& sub, int d) {
  if (sub.empty()) return false;
  const int nv = touched_vertex_count(g, sub);
  if (d * nv != (d - 1) * sub.size() + d + 1) return false;
  return !find_violation(g, sub.bits(), d);
}

std::vector<EdgeSubset> laman_subgraphs(const DecoratedGraph& g, int d) {
  if (d < 1) throw Error(ErrorKind::InvalidArgument, "d must be positive");
  g.require_simple_connected();
  const int m = g.num_edges();
  if (m > 30) throw Error(ErrorKind::InvalidArgument, "laman_subgraphs enumerates 2^|E| subsets; too many edges");
  std::vector<EdgeSubset> out;
  for (std::uint64_t b = 1; b < (std::uint64_t{1} << m); ++b) {
    EdgeSubset s(m, b);
    if (subset_connected(g, s) && laman_subset(g, s, d)) out.push_back(s);
  }
  std::sort(out.begin(), out.end(), [](const EdgeSubset& a, const EdgeSubset& b) { return a.lex_less(b); });
  return out;
}

// ------------------------------------------------------- subgraph operations

DecoratedGraph quotient(const DecoratedGraph& g, const EdgeSubset& sub) {
  if (sub.empty()) throw Error(ErrorKind::EmptySubset, "quotient by an empty subset");
  const int n = g.num_vertices();
  UnionFind uf(n);
  for (int e : sub.indices()) uf.unite(g.edge(e).tail - 1, g.edge(e).head - 1);
  // classes ordered by their largest member, so the ground class stays last
  std::vector<int> class_max(n, -1);
  for (int v = 0; v < n; ++v) class_max[uf.find(v)] = std::max(class_max[uf.find(v)], v);
  std::vector<int> keys;
  for (int v = 0; v < n; ++v)
    if (uf.find(v) == v) keys.push_back(class_max[v]);
  std::sort(keys.begin(), keys.end());
  std::vector<int> label(n);
  for (int v = 0; v < n; ++v) {
    int key = class_max[uf.find(v)];
    label[v] = static_cast<int>(std::lower_bound(keys.begin(), keys.end(), key) - keys.begin()) + 1;
  }
  std::vector<Edge> es;
  for (int e = 0; e < g.num_edges(); ++e) {
    if (sub.contains(e)) continue;
    Edge ed = g.edge(e);
    ed.tail = label[ed.tail - 1];
    ed.head = label[ed.head - 1];
    es.push_back(ed);
  }
  return DecoratedGraph(g.dim(), static_cast<int>(keys.size()), es);
}

DecoratedGraph complement(const DecoratedGraph& g, const EdgeSubset& sub) {
  return g.restricted(sub.complement());
}

int permutation_sign(const DecoratedGraph& g, const EdgeSubset& sub) {
  if (sub.empty()) throw Error(ErrorKind::EmptySubset, "permutation sign of an empty subset");
  std::vector<int> seq;
  for (int e = 0; e < g.num_edges(); ++e)
    if (!sub.contains(e)) seq.push_back(e);
  for (int e : sub.indices()) seq.push_back(e);
  int inv = 0;
  for (size_t i = 0; i < seq.size(); ++i)
    for (size_t j = i + 1; j < seq.size(); ++j)
      if (seq[i] > seq[j]) ++inv;
  return inv % 2 ? -1 : 1;
}

// ------------------------------------------------------ trees and cut sets

std::vector<EdgeSubset> spanning_trees(const DecoratedGraph& g) {
  g.require_simple_connected();
  const int n = g.num_vertices(), m = g.num_edges();
  std::vector<EdgeSubset> out;
  for_each_combination(m, n - 1, [&](std::uint64_t b) {
    UnionFind uf(n);
    for (int e = 0; e < m; ++e)
      if ((b >> e) & 1u)
        if (!uf.unite(g.edge(e).tail - 1, g.edge(e).head - 1)) return;
    out.emplace_back(m, b);
  });
  return out;
}

std::vector<EdgeSubset> cuts(const DecoratedGraph& g, const std::vector<int>& v1, const std::vector<int>& v2) {
  g.require_simple_connected();
  const int n = g.num_vertices(), m = g.num_edges();
  for (int a : v1)
    for (int b : v2)
      if (a == b) throw Error(ErrorKind::OverlappingVertexSets, "vertex sets overlap");
  for (int v : v1)
    if (v < 1 || v > n) throw Error(ErrorKind::InvalidArgument, "vertex out of range");
  for (int v : v2)
    if (v < 1 || v > n) throw Error(ErrorKind::InvalidArgument, "vertex out of range");
  std::vector<EdgeSubset> out;
  if (v1.empty() || v2.empty()) return out;
  const int h1 = first_betti(g);
  for_each_combination(m, n - 2, [&](std::uint64_t forest) {
    UnionFind uf(n);
    for (int e = 0; e < m; ++e)
      if ((forest >> e) & 1u)
        if (!uf.unite(g.edge(e).tail - 1, g.edge(e).head - 1)) return;
    const int r1 = uf.find(v1[0] - 1), r2 = uf.find(v2[0] - 1);
    if (r1 == r2) return;
    for (int v : v1)
      if (uf.find(v - 1) != r1) return;
    for (int v : v2)
      if (uf.find(v - 1) != r2) return;
    EdgeSubset c(m, EdgeSubset::full(m).bits() & ~forest);
    if (c.size() != h1 + 1) throw Error(ErrorKind::Assertion, "cut cardinality differs from h1+1");
    out.push_back(c);
  });
  return out;
}

}  // namespace feyn
