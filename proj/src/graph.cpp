#include "acdm/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "acdm/errors.hpp"
#include "acdm/matrix_market.hpp"

namespace acdm {

namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

struct DisjointSets {
  std::vector<std::size_t> parent;
  std::vector<std::size_t> rank;
  explicit DisjointSets(std::size_t n) : parent(n), rank(n, 0) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank[a] < rank[b]) std::swap(a, b);
    parent[b] = a;
    if (rank[a] == rank[b]) ++rank[a];
    return true;
  }
};

}  // namespace

WeightedGraph::WeightedGraph(std::size_t n_in, std::vector<Edge> e) : n(n_in), edges(std::move(e)) {
  if (n == 0) throw InputError("graph: need at least one vertex");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge& ed = edges[i];
    if (ed.u >= n || ed.v >= n) throw InputError("graph: edge " + std::to_string(i) + " has a vertex out of range");
    if (ed.u == ed.v) throw InputError("graph: edge " + std::to_string(i) + " is a self-loop");
    if (!(ed.r > 0.0) || !std::isfinite(ed.r)) {
      throw InputError("graph: edge " + std::to_string(i) + " needs a finite positive resistance");
    }
  }
}

bool WeightedGraph::connected() const {
  DisjointSets ds(n);
  std::size_t parts = n;
  for (const Edge& e : edges) parts -= ds.unite(e.u, e.v) ? 1 : 0;
  return parts == 1;
}

CsrMatrix laplacian(const WeightedGraph& g) {
  std::vector<Triplet> t;
  t.reserve(4 * g.m());
  for (const Edge& e : g.edges) {
    const double w = 1.0 / e.r;
    t.push_back({e.u, e.u, w});
    t.push_back({e.v, e.v, w});
    t.push_back({e.u, e.v, -w});
    t.push_back({e.v, e.u, -w});
  }
  return CsrMatrix::from_triplets(g.n, g.n, t);
}

WeightedGraph graph_from_laplacian(const CsrMatrix& l, double tol) {
  if (l.rows() != l.cols() || !l.is_symmetric(1e-12)) throw InputError("laplacian: matrix must be square and symmetric");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < l.rows(); ++i) {
    const RowView row = l.row(i);
    double sum = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < row.cols.size(); ++k) {
      const std::size_t j = row.cols[k];
      const double v = row.values[k];
      sum += v;
      scale = std::max(scale, std::abs(v));
      if (j == i || v == 0.0) continue;
      if (v > 0.0) {
        throw InputError(
            "laplacian: positive off-diagonal entry; general SDD systems must first be reduced to a Laplacian "
            "(e.g. the Gremban double cover)");
      }
      if (j > i) edges.push_back({i, j, -1.0 / v});
    }
    if (std::abs(sum) > tol * std::max(1.0, scale)) {
      throw InputError("laplacian: row " + std::to_string(i) +
                       " does not sum to zero; only graph Laplacians are accepted (reduce SDD input first)");
    }
  }
  return WeightedGraph(l.rows(), std::move(edges));
}

WeightedGraph read_edge_list(std::istream& in, std::size_t n) {
  std::vector<Edge> edges;
  std::size_t max_v = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    long long u, v;
    double r;
    if (!(ss >> u)) continue;
    if (!(ss >> v >> r) || u < 0 || v < 0) {
      throw InputError("edge list: malformed line " + std::to_string(lineno) + " (expected 'u v resistance')");
    }
    edges.push_back({static_cast<std::size_t>(u), static_cast<std::size_t>(v), r});
    max_v = std::max({max_v, static_cast<std::size_t>(u), static_cast<std::size_t>(v)});
  }
  if (n == 0) n = edges.empty() ? 1 : max_v + 1;
  return WeightedGraph(n, std::move(edges));
}

WeightedGraph read_edge_list(const std::filesystem::path& path, std::size_t n) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return read_edge_list(in, n);
}

void write_edge_list(std::ostream& out, const WeightedGraph& g) {
  out << "# " << g.n << " vertices, " << g.m() << " edges: u v resistance\n";
  for (const Edge& e : g.edges) out << e.u << ' ' << e.v << ' ' << format_double(e.r) << '\n';
}

void write_edge_list(const std::filesystem::path& path, const WeightedGraph& g) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  write_edge_list(out, g);
}

// ---------------------------------------------------------------------------

SpanningTree::SpanningTree(const WeightedGraph& g)
    : g_(&g),
      parent_(g.n, kNone),
      parent_edge_(g.n, kNone),
      depth_(g.n, 0),
      pos_(g.n, 0),
      head_(g.n, 0),
      root_dist_(g.n, 0.0),
      in_tree_(g.m(), false),
      off_index_(g.m(), kNone) {}

SpanningTree::SpanningTree(const WeightedGraph& g, TreeStrategy strategy) : SpanningTree(g) {
  if (strategy == TreeStrategy::MinResistance) {
    std::vector<std::size_t> idx(g.m());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return g.edges[a].r < g.edges[b].r; });
    DisjointSets ds(g.n);
    for (std::size_t e : idx) {
      if (ds.unite(g.edges[e].u, g.edges[e].v)) in_tree_[e] = true;
    }
    finish(false);
  } else {
    finish(true);
  }
}

SpanningTree::SpanningTree(const WeightedGraph& g, std::span<const std::size_t> tree_edges) : SpanningTree(g) {
  if (tree_edges.size() + 1 != g.n) throw InputError("spanning tree: need exactly n-1 tree edges");
  DisjointSets ds(g.n);
  for (std::size_t e : tree_edges) {
    if (e >= g.m()) throw InputError("spanning tree: edge id out of range");
    if (!ds.unite(g.edges[e].u, g.edges[e].v)) throw InputError("spanning tree: given edges contain a cycle");
    in_tree_[e] = true;
  }
  finish(false);
}

void SpanningTree::finish(bool bfs_over_graph) {
  const WeightedGraph& g = *g_;
  const std::size_t n = g.n;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(n);  // (neighbour, edge)
  for (std::size_t e = 0; e < g.m(); ++e) {
    if (!bfs_over_graph && !in_tree_[e]) continue;
    adj[g.edges[e].u].push_back({g.edges[e].v, e});
    adj[g.edges[e].v].push_back({g.edges[e].u, e});
  }

  // BFS from the root; unless bfs_over_graph, adj already is the tree.
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> bfs;
  bfs.reserve(n);
  bfs.push_back(0);
  seen[0] = true;
  for (std::size_t h = 0; h < bfs.size(); ++h) {
    const std::size_t x = bfs[h];
    for (const auto& [y, e] : adj[x]) {
      if (seen[y]) continue;
      seen[y] = true;
      parent_[y] = x;
      parent_edge_[y] = e;
      depth_[y] = depth_[x] + 1;
      root_dist_[y] = root_dist_[x] + g.edges[e].r;
      bfs.push_back(y);
    }
  }
  if (bfs.size() != n) throw InputError("spanning tree: graph is disconnected");
  if (bfs_over_graph) {
    for (std::size_t v = 1; v < n; ++v) in_tree_[parent_edge_[v]] = true;
  }

  // Heavy-light decomposition.
  std::vector<std::size_t> size(n, 1), heavy(n, kNone);
  for (std::size_t h = n; h-- > 1;) size[parent_[bfs[h]]] += size[bfs[h]];
  std::vector<std::vector<std::size_t>> children(n);
  for (std::size_t h = 1; h < n; ++h) children[parent_[bfs[h]]].push_back(bfs[h]);
  for (std::size_t v = 0; v < n; ++v) {
    std::size_t best = 0;
    for (std::size_t c : children[v]) {
      if (size[c] > best) {
        best = size[c];
        heavy[v] = c;
      }
    }
  }
  order_.reserve(n);
  std::vector<std::size_t> stack{0};
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    // Heavy chains get contiguous positions; light children start new chains.
    for (std::size_t x = v; x != kNone; x = heavy[x]) {
      pos_[x] = order_.size();
      order_.push_back(x);
      for (std::size_t c : children[x]) {
        if (c != heavy[x]) stack.push_back(c);
      }
    }
  }
  for (std::size_t v : order_) {
    if (parent_[v] == kNone || heavy[parent_[v]] != v) head_[v] = v;
    else head_[v] = head_[parent_[v]];
  }

  for (std::size_t e = 0; e < g.m(); ++e) {
    if (in_tree_[e]) continue;
    off_index_[e] = off_tree_.size();
    off_tree_.push_back(e);
    stretch_.push_back(stretch(e));
  }
}

double SpanningTree::upward_sign(std::size_t e) const {
  const Edge& ed = g_->edges[e];
  // The child endpoint is the deeper one.
  return depth_[ed.u] > depth_[ed.v] ? 1.0 : -1.0;
}

std::size_t SpanningTree::lca(std::size_t a, std::size_t b) const {
  while (head_[a] != head_[b]) {
    if (depth_[head_[a]] >= depth_[head_[b]]) a = parent_[head_[a]];
    else b = parent_[head_[b]];
  }
  return depth_[a] <= depth_[b] ? a : b;
}

double SpanningTree::path_resistance(std::size_t a, std::size_t b) const {
  return root_dist_[a] + root_dist_[b] - 2.0 * root_dist_[lca(a, b)];
}

double SpanningTree::stretch(std::size_t e) const {
  const Edge& ed = g_->edges[e];
  return path_resistance(ed.u, ed.v) / ed.r;
}

Vector SpanningTree::off_tree_lipschitz() const {
  Vector l(stretch_.size());
  for (std::size_t k = 0; k < l.size(); ++k) l[k] = stretch_[k] + 1.0;
  return l;
}

double measured_total_stretch(const SpanningTree& t) {
  double s = 0.0;
  for (double st : t.off_tree_stretch()) s += st + 1.0;
  return s;
}

// ---------------------------------------------------------------------------

TreePathStructure::TreePathStructure(const SpanningTree& t)
    : t_(&t), n_(t.n()), r_by_pos_(t.n(), 0.0), sr_(4 * t.n(), 0.0), srz_(4 * t.n(), 0.0), tag_(4 * t.n(), 0.0) {
  for (std::size_t v = 0; v < n_; ++v) {
    if (v != t.root()) r_by_pos_[t.pos(v)] = t.graph().edges[t.parent_edge(v)].r;
  }
  const Vector zero(n_, 0.0);
  build(1, 0, n_ - 1, zero);
}

void TreePathStructure::build(std::size_t node, std::size_t lo, std::size_t hi, std::span<const double> z_by_pos) {
  if (lo == hi) {
    sr_[node] = r_by_pos_[lo];
    tag_[node] = z_by_pos[lo];
    srz_[node] = r_by_pos_[lo] * z_by_pos[lo];
    return;
  }
  const std::size_t mid = (lo + hi) / 2;
  build(2 * node, lo, mid, z_by_pos);
  build(2 * node + 1, mid + 1, hi, z_by_pos);
  tag_[node] = 0.0;
  sr_[node] = sr_[2 * node] + sr_[2 * node + 1];
  srz_[node] = srz_[2 * node] + srz_[2 * node + 1];
}

void TreePathStructure::set_flows(std::span<const double> zup) {
  if (zup.size() != n_) throw InputError("tree path structure: flow vector has wrong length");
  Vector by_pos(n_, 0.0);
  for (std::size_t v = 0; v < n_; ++v) {
    if (v != t_->root()) by_pos[t_->pos(v)] = zup[v];
  }
  build(1, 0, n_ - 1, by_pos);
}

void TreePathStructure::add(std::size_t node, std::size_t lo, std::size_t hi, std::size_t l, std::size_t r,
                            double delta) {
  if (r < lo || hi < l) return;
  if (l <= lo && hi <= r) {
    tag_[node] += delta;
    srz_[node] += delta * sr_[node];
    return;
  }
  const std::size_t mid = (lo + hi) / 2;
  add(2 * node, lo, mid, l, r, delta);
  add(2 * node + 1, mid + 1, hi, l, r, delta);
  srz_[node] = srz_[2 * node] + srz_[2 * node + 1] + tag_[node] * sr_[node];
}

double TreePathStructure::query(std::size_t node, std::size_t lo, std::size_t hi, std::size_t l, std::size_t r,
                                double acc) const {
  if (r < lo || hi < l) return 0.0;
  if (l <= lo && hi <= r) return srz_[node] + acc * sr_[node];
  const std::size_t mid = (lo + hi) / 2;
  const double a = acc + tag_[node];
  return query(2 * node, lo, mid, l, r, a) + query(2 * node + 1, mid + 1, hi, l, r, a);
}

void TreePathStructure::path_add(std::size_t from, std::size_t to, double delta) {
  if (delta == 0.0) return;
  t_->for_each_segment(from, to, [&](std::size_t lo, std::size_t hi, double sign) {
    add(1, 0, n_ - 1, lo, hi, sign * delta);
  });
}

double TreePathStructure::path_weighted_sum(std::size_t from, std::size_t to) const {
  double s = 0.0;
  t_->for_each_segment(from, to, [&](std::size_t lo, std::size_t hi, double sign) {
    s += sign * query(1, 0, n_ - 1, lo, hi, 0.0);
  });
  return s;
}

double TreePathStructure::upward_flow(std::size_t v) const {
  const std::size_t p = t_->pos(v);
  std::size_t node = 1, lo = 0, hi = n_ - 1;
  double z = 0.0;
  while (true) {
    z += tag_[node];
    if (lo == hi) return z;
    const std::size_t mid = (lo + hi) / 2;
    if (p <= mid) {
      node = 2 * node;
      hi = mid;
    } else {
      node = 2 * node + 1;
      lo = mid + 1;
    }
  }
}

Vector TreePathStructure::upward_flows() const {
  Vector by_pos(n_, 0.0);
  // Iterative descent accumulating tags.
  struct Frame {
    std::size_t node, lo, hi;
    double acc;
  };
  std::vector<Frame> stack{{1, 0, n_ - 1, 0.0}};
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    const double acc = f.acc + tag_[f.node];
    if (f.lo == f.hi) {
      by_pos[f.lo] = acc;
      continue;
    }
    const std::size_t mid = (f.lo + f.hi) / 2;
    stack.push_back({2 * f.node, f.lo, mid, acc});
    stack.push_back({2 * f.node + 1, mid + 1, f.hi, acc});
  }
  Vector zup(n_, 0.0);
  for (std::size_t v = 0; v < n_; ++v) {
    if (v != t_->root()) zup[v] = by_pos[t_->pos(v)];
  }
  return zup;
}

}  // namespace acdm
