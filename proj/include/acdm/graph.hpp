#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "acdm/csr_matrix.hpp"

namespace acdm {

struct Edge {
  std::size_t u;
  std::size_t v;
  double r;  // resistance
};

// Undirected resistor network; each edge carries the orientation u -> v for
// signing flows (incidence row: +1 at u, -1 at v).
struct WeightedGraph {
  std::size_t n = 0;
  std::vector<Edge> edges;

  WeightedGraph() = default;
  WeightedGraph(std::size_t n, std::vector<Edge> edges);
  std::size_t m() const { return edges.size(); }
  bool connected() const;
};

// L = B^T R^{-1} B.
CsrMatrix laplacian(const WeightedGraph& g);
// Inverse of laplacian(): off-diagonal -w becomes an edge with r = 1/w.
// Positive off-diagonals or nonzero row sums are rejected.
WeightedGraph graph_from_laplacian(const CsrMatrix& l, double tol = 1e-10);

// Lines "u v r" with 0-based vertices; '#' starts a comment. The vertex
// count is one more than the largest index unless `n` is given.
WeightedGraph read_edge_list(std::istream& in, std::size_t n = 0);
WeightedGraph read_edge_list(const std::filesystem::path& path, std::size_t n = 0);
void write_edge_list(std::ostream& out, const WeightedGraph& g);
void write_edge_list(const std::filesystem::path& path, const WeightedGraph& g);

enum class TreeStrategy {
  MinResistance,  // Kruskal on resistances
  BfsFromRoot,
};

// Spanning tree rooted at vertex 0. Holds a pointer to the graph, which must
// outlive it. with a heavy-light decomposition. The tree
// edge above v is stored at position pos(v); its flow is kept in the upward
// orientation v -> parent(v).
class SpanningTree {
 public:
  SpanningTree(const WeightedGraph& g, TreeStrategy strategy);
  // Uses the given edge ids as the tree; they must form a spanning tree.
  SpanningTree(const WeightedGraph& g, std::span<const std::size_t> tree_edges);

  const WeightedGraph& graph() const { return *g_; }
  std::size_t n() const { return parent_.size(); }
  std::size_t root() const { return 0; }

  std::size_t parent(std::size_t v) const { return parent_[v]; }
  std::size_t parent_edge(std::size_t v) const { return parent_edge_[v]; }
  std::size_t depth(std::size_t v) const { return depth_[v]; }
  std::size_t pos(std::size_t v) const { return pos_[v]; }
  std::size_t head(std::size_t v) const { return head_[v]; }
  // Vertices in preorder (parents before children).
  std::span<const std::size_t> order() const { return order_; }

  bool in_tree(std::size_t e) const { return in_tree_[e]; }
  std::span<const std::size_t> off_tree() const { return off_tree_; }
  std::size_t off_tree_index(std::size_t e) const { return off_index_[e]; }

  // Sign of edge e relative to the upward orientation of the child it hangs from.
  double upward_sign(std::size_t e) const;

  std::size_t lca(std::size_t a, std::size_t b) const;
  double path_resistance(std::size_t a, std::size_t b) const;
  // Tree-path resistance between the endpoints of e, over r_e.
  double stretch(std::size_t e) const;
  std::span<const double> off_tree_stretch() const { return stretch_; }
  // st(e) + 1 per off-tree edge.
  Vector off_tree_lipschitz() const;

  // Calls f(lo, hi, sign) for maximal position ranges on the path a -> b;
  // sign is +1 where the path climbs toward the root and -1 where it descends.
  template <typename F>
  void for_each_segment(std::size_t a, std::size_t b, F&& f) const;

 private:
  explicit SpanningTree(const WeightedGraph& g);
  // Roots the tree described by in_tree_ (or by BFS over all edges).
  void finish(bool bfs_over_graph);

  const WeightedGraph* g_;
  std::vector<std::size_t> parent_, parent_edge_, depth_, pos_, head_, order_;
  std::vector<double> root_dist_;
  std::vector<bool> in_tree_;
  std::vector<std::size_t> off_tree_, off_index_;
  Vector stretch_;
};

double measured_total_stretch(const SpanningTree& t);

template <typename F>
void SpanningTree::for_each_segment(std::size_t a, std::size_t b, F&& f) const {
  while (head_[a] != head_[b]) {
    if (depth_[head_[a]] >= depth_[head_[b]]) {
      f(pos_[head_[a]], pos_[a], 1.0);
      a = parent_[head_[a]];
    } else {
      f(pos_[head_[b]], pos_[b], -1.0);
      b = parent_[head_[b]];
    }
  }
  if (depth_[a] > depth_[b]) {
    f(pos_[b] + 1, pos_[a], 1.0);
  } else if (depth_[b] > depth_[a]) {
    f(pos_[a] + 1, pos_[b], -1.0);
  }
}

// Path add / path weighted sum over tree-edge flows, O(log^2 n) per call.
// Segment tree with non-propagated tags: a tag at a node applies to every
// leaf below it.
class TreePathStructure {
 public:
  explicit TreePathStructure(const SpanningTree& t);

  // Upward flows indexed by vertex; the root entry is ignored.
  void set_flows(std::span<const double> zup);
  // Sends delta units along the tree path from -> to.
  void path_add(std::size_t from, std::size_t to, double delta);
  // Sum of r * z over the path, with z signed in the from -> to direction.
  double path_weighted_sum(std::size_t from, std::size_t to) const;
  double upward_flow(std::size_t v) const;
  Vector upward_flows() const;

 private:
  void build(std::size_t node, std::size_t lo, std::size_t hi, std::span<const double> z_by_pos);
  void add(std::size_t node, std::size_t lo, std::size_t hi, std::size_t l, std::size_t r, double delta);
  double query(std::size_t node, std::size_t lo, std::size_t hi, std::size_t l, std::size_t r, double acc) const;

  const SpanningTree* t_;
  std::size_t n_;
  Vector r_by_pos_;
  Vector sr_, srz_, tag_;
};

}  // namespace acdm
