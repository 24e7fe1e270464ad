#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace feyn {

// Vertices are 1-based in the text format and in public APIs that take vertex
// labels; edges are 0-based positions in the edge order.
struct Edge {
  int tail = 0;
  int head = 0;
  std::vector<int> decoration;
};

// Bitset over edge positions of a parent graph (at most 64 edges).
class EdgeSubset {
 public:
  EdgeSubset() = default;
  EdgeSubset(int num_edges, std::uint64_t bits);
  static EdgeSubset full(int num_edges);
  static EdgeSubset of(int num_edges, const std::vector<int>& edges);

  int parent_size() const { return n_; }
  std::uint64_t bits() const { return bits_; }
  bool contains(int e) const { return (bits_ >> e) & 1u; }
  int size() const;
  bool empty() const { return bits_ == 0; }
  std::vector<int> indices() const;
  EdgeSubset complement() const;
  std::string to_string() const;  // "{1,3}" with 1-based labels

  bool operator==(const EdgeSubset& o) const { return n_ == o.n_ && bits_ == o.bits_; }
  // Lexicographic order on the sorted index lists.
  bool lex_less(const EdgeSubset& o) const;

 private:
  int n_ = 0;
  std::uint64_t bits_ = 0;
};

class DecoratedGraph {
 public:
  DecoratedGraph() = default;
  DecoratedGraph(int dim, int num_vertices, std::vector<Edge> edges);

  int dim() const { return dim_; }
  int num_vertices() const { return nv_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_[e]; }
  int ground() const { return nv_; }
  int decoration_total() const;

  bool has_self_loop() const;
  bool is_connected() const;  // over all vertices
  int num_components() const;
  // Throws SelfLoop / Disconnected.
  void require_simple_connected() const;

  DecoratedGraph with_dim(int d) const;  // zero decorations of new length when d changes
  DecoratedGraph restricted(const EdgeSubset& sub) const;  // same vertices, only sub's edges

 private:
  int dim_ = 1;
  int nv_ = 0;
  std::vector<Edge> edges_;
};

DecoratedGraph parse_graph(const std::string& text);
DecoratedGraph load_graph(const std::string& path);
std::string format_graph(const DecoratedGraph& g);

// rows = edges, cols = vertices 1..n-1
std::vector<std::vector<int>> incidence_matrix(const DecoratedGraph& g);

int first_betti(const DecoratedGraph& g);
int first_betti(const DecoratedGraph& g, const EdgeSubset& sub);
int touched_vertex_count(const DecoratedGraph& g, const EdgeSubset& sub);
int component_count(const DecoratedGraph& g, const EdgeSubset& sub);  // among touched vertices
bool subset_connected(const DecoratedGraph& g, const EdgeSubset& sub);

struct LamanVerdict {
  bool laman = false;
  bool equality_holds = false;
  std::optional<EdgeSubset> witness;  // a subgraph violating the inequality
};

// Checks every edge-generated subgraph, connected or not.
LamanVerdict is_laman(const DecoratedGraph& g, int d);
bool laman_inequality(int d, int vertices, int edges);
bool laman_subset(const DecoratedGraph& g, const EdgeSubset& sub, int d);
std::vector<EdgeSubset> laman_subgraphs(const DecoratedGraph& g, int d);

DecoratedGraph quotient(const DecoratedGraph& g, const EdgeSubset& sub);
DecoratedGraph complement(const DecoratedGraph& g, const EdgeSubset& sub);
int permutation_sign(const DecoratedGraph& g, const EdgeSubset& sub);

std::vector<EdgeSubset> spanning_trees(const DecoratedGraph& g);
// Complements of spanning 2-forests separating v1 from v2 (1-based vertex labels).
std::vector<EdgeSubset> cuts(const DecoratedGraph& g, const std::vector<int>& v1,
                             const std::vector<int>& v2);

}  // namespace feyn
