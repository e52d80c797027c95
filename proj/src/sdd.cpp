#include "acdm/sdd.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

#include "acdm/engine.hpp"
#include "acdm/errors.hpp"
#include "acdm/rng.hpp"

namespace acdm {

Vector exact_demands(std::span<const double> chi) {
  double sum = 0.0, l1 = 0.0;
  for (double c : chi) {
    if (!std::isfinite(c)) throw InputError("demands: non-finite entry");
    sum += c;
    l1 += std::abs(c);
  }
  if (std::abs(sum) > 1e-12 * std::max(1.0, l1)) {
    throw InputError("demands must sum to zero (sum = " + std::to_string(sum) + ")");
  }
  Vector out(chi.begin(), chi.end());
  const double mean = sum / static_cast<double>(chi.size());
  for (double& c : out) c -= mean;
  return out;
}

Vector tree_flows_for(const SpanningTree& t, std::span<const double> chi, std::span<const double> off) {
  const WeightedGraph& g = t.graph();
  if (chi.size() != g.n) throw InputError("flow: demand vector has wrong length");
  if (off.size() != t.off_tree().size()) throw InputError("flow: off-tree vector has wrong length");
  Vector zup(chi.begin(), chi.end());
  for (std::size_t k = 0; k < off.size(); ++k) {
    const Edge& e = g.edges[t.off_tree()[k]];
    zup[e.u] -= off[k];
    zup[e.v] += off[k];
  }
  const auto order = t.order();
  for (std::size_t i = order.size(); i-- > 1;) {
    const std::size_t v = order[i];
    zup[t.parent(v)] += zup[v];
  }
  zup[t.root()] = 0.0;
  return zup;
}

Vector potentials_from_flow(const SpanningTree& t, std::span<const double> zup) {
  const WeightedGraph& g = t.graph();
  Vector x(g.n, 0.0);
  for (std::size_t v : t.order()) {
    if (v == t.root()) continue;
    x[v] = x[t.parent(v)] + g.edges[t.parent_edge(v)].r * zup[v];
  }
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(g.n);
  for (double& xi : x) xi -= mean;
  return x;
}

double dual_objective(const WeightedGraph& g, std::span<const double> chi, std::span<const double> x) {
  double lin = 0.0;
  for (std::size_t v = 0; v < g.n; ++v) lin += chi[v] * x[v];
  double quad = 0.0;
  for (const Edge& e : g.edges) {
    const double d = x[e.u] - x[e.v];
    quad += d * d / e.r;
  }
  return lin - 0.5 * quad;
}

double conservation_error(const WeightedGraph& g, std::span<const double> z, std::span<const double> chi) {
  Vector res(chi.begin(), chi.end());
  for (double& c : res) c = -c;
  for (std::size_t i = 0; i < g.m(); ++i) {
    res[g.edges[i].u] += z[i];
    res[g.edges[i].v] -= z[i];
  }
  double worst = 0.0;
  for (double r : res) worst = std::max(worst, std::abs(r));
  return worst;
}

double flow_energy(const WeightedGraph& g, std::span<const double> z) {
  double s = 0.0;
  for (std::size_t i = 0; i < g.m(); ++i) s += g.edges[i].r * z[i] * z[i];
  return 0.5 * s;
}

// ---------------------------------------------------------------------------

FlowState::FlowState(const SpanningTree& t, std::span<const double> chi)
    : t_(&t), chi_(chi.begin(), chi.end()), off_(t.off_tree().size(), 0.0), path_(t) {
  if (chi_.size() != t.n()) throw InputError("flow: demand vector has wrong length");
  path_.set_flows(tree_flows_for(t, chi_, off_));
}

double FlowState::cycle_sum_at(std::size_t k) const {
  const std::size_t e = t_->off_tree()[k];
  const Edge& ed = t_->graph().edges[e];
  return ed.r * off_[k] + path_.path_weighted_sum(ed.v, ed.u);
}

double FlowState::cycle_sum(std::size_t e) const {
  if (e >= t_->graph().m()) throw InputError("cycle: edge id out of range");
  if (t_->in_tree(e)) throw InputError("cycle: edge " + std::to_string(e) + " is a tree edge");
  return cycle_sum_at(t_->off_tree_index(e));
}

void FlowState::add_cycle_at(std::size_t k, double t) {
  const Edge& ed = t_->graph().edges[t_->off_tree()[k]];
  off_[k] += t;
  path_.path_add(ed.v, ed.u, t);
}

void FlowState::add_cycle(std::size_t e, double t) {
  if (e >= t_->graph().m()) throw InputError("cycle: edge id out of range");
  if (t_->in_tree(e)) throw InputError("cycle: edge " + std::to_string(e) + " is a tree edge");
  add_cycle_at(t_->off_tree_index(e), t);
}

void FlowState::set_off_tree_flows(std::span<const double> off) {
  if (off.size() != off_.size()) throw InputError("flow: off-tree vector has wrong length");
  off_.assign(off.begin(), off.end());
  path_.set_flows(tree_flows_for(*t_, chi_, off_));
}

Vector FlowState::edge_flows() const {
  const WeightedGraph& g = t_->graph();
  Vector z(g.m(), 0.0);
  const Vector zup = path_.upward_flows();
  for (std::size_t v = 0; v < g.n; ++v) {
    if (v == t_->root()) continue;
    const std::size_t e = t_->parent_edge(v);
    z[e] = t_->upward_sign(e) * zup[v];
  }
  for (std::size_t k = 0; k < off_.size(); ++k) z[t_->off_tree()[k]] = off_[k];
  return z;
}

double FlowState::energy() const { return flow_energy(t_->graph(), edge_flows()); }

Vector FlowState::all_cycle_sums() const {
  const WeightedGraph& g = t_->graph();
  const Vector zup = path_.upward_flows();
  // P(v) = sum of r * zup along the root path of v; path sum b -> a = P(b) - P(a).
  Vector p(g.n, 0.0);
  for (std::size_t v : t_->order()) {
    if (v != t_->root()) p[v] = p[t_->parent(v)] + g.edges[t_->parent_edge(v)].r * zup[v];
  }
  Vector s(off_.size());
  for (std::size_t k = 0; k < off_.size(); ++k) {
    const Edge& ed = g.edges[t_->off_tree()[k]];
    s[k] = ed.r * off_[k] + p[ed.v] - p[ed.u];
  }
  return s;
}

double cycle_partial(const FlowState& s, std::size_t e) { return s.cycle_sum(e); }

double cycle_update(FlowState& s, std::size_t e) {
  const double sum = s.cycle_sum(e);
  const SpanningTree& t = s.tree();
  const double r = t.graph().edges[e].r;
  const double st = t.off_tree_stretch()[t.off_tree_index(e)];
  const double push = -sum / (r * (st + 1.0));
  if (push != 0.0) s.add_cycle(e, push);
  return push;
}

// ---------------------------------------------------------------------------

namespace {

Vector inverse_sqrt_resistances(const SpanningTree& t) {
  Vector v(t.off_tree().size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = 1.0 / std::sqrt(t.graph().edges[t.off_tree()[k]].r);
  return v;
}

Vector checked_lipschitz(const SpanningTree& t) {
  if (t.off_tree().empty()) throw InputError("cycle oracle: graph has no off-tree edges");
  return t.off_tree_lipschitz();
}

}  // namespace

CycleOracle::CycleOracle(const SpanningTree& t, FlowState base)
    : CoordinateOracle(checked_lipschitz(t)),
      t_(&t),
      inv_sqrt_r_(inverse_sqrt_resistances(t)),
      base_(std::move(base)),
      cu_(t, Vector(t.n(), 0.0)),
      cw_(t, Vector(t.n(), 0.0)) {
  if (&base_.tree() != &t) throw InputError("cycle oracle: base flow belongs to another tree");
}

void CycleOracle::set_base(FlowState base) {
  if (&base.tree() != t_) throw InputError("cycle oracle: base flow belongs to another tree");
  base_ = std::move(base);
}

double CycleOracle::do_partial(std::size_t k, double c1, double c2) const {
  double s = base_.cycle_sum_at(k);
  if (c1 != 0.0) s += c1 * cu_.cycle_sum_at(k);
  if (c2 != 0.0) s += c2 * cw_.cycle_sum_at(k);
  return inv_sqrt_r_[k] * s;
}

void CycleOracle::do_increment(Register r, std::size_t k, double delta) {
  (r == Register::U ? cu_ : cw_).add_cycle_at(k, delta * inv_sqrt_r_[k]);
}

void CycleOracle::do_rebuild() {
  Vector off(dim());
  for (std::size_t k = 0; k < off.size(); ++k) off[k] = u()[k] * inv_sqrt_r_[k];
  cu_.set_off_tree_flows(off);
  for (std::size_t k = 0; k < off.size(); ++k) off[k] = w()[k] * inv_sqrt_r_[k];
  cw_.set_off_tree_flows(off);
}

FlowState CycleOracle::flow_for(std::span<const double> y) const {
  if (y.size() != dim()) throw InputError("cycle oracle: point has wrong length");
  Vector off(base_.off_tree_flows().begin(), base_.off_tree_flows().end());
  for (std::size_t k = 0; k < off.size(); ++k) off[k] += y[k] * inv_sqrt_r_[k];
  FlowState s = base_;
  s.set_off_tree_flows(off);
  return s;
}

FlowState CycleOracle::flow_at(double c1, double c2) const { return flow_for(combine(c1, c2)); }

double CycleOracle::value(std::span<const double> y) const { return flow_for(y).energy(); }

Vector CycleOracle::gradient(std::span<const double> y) const {
  Vector g = flow_for(y).all_cycle_sums();
  for (std::size_t k = 0; k < g.size(); ++k) g[k] *= inv_sqrt_r_[k];
  return g;
}

// ---------------------------------------------------------------------------

LaplacianSolveResult solve_laplacian(const WeightedGraph& g, std::span<const double> chi_in, double eps,
                                     const LaplacianSolveConfig& cfg) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw InputError("laplacian solve: eps must be > 0");
  if (chi_in.size() != g.n) throw InputError("laplacian solve: demand vector has wrong length");
  const Vector chi = exact_demands(chi_in);
  const SpanningTree tree(g, cfg.strategy);
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - t0).count();
  };

  LaplacianSolveResult res;
  LaplacianSolveStats& st = res.stats;
  st.off_tree_edges = tree.off_tree().size();
  st.total_stretch = measured_total_stretch(tree);

  FlowState flow(tree, chi);
  auto certify = [&](const FlowState& f) {
    res.flow = f.edge_flows();
    res.potentials = potentials_from_flow(tree, f.upward_flows());
    st.energy = flow_energy(g, res.flow);
    st.dual = dual_objective(g, chi, res.potentials);
    st.gap = st.energy - st.dual;
    // ||x - x*||_L^2 = 2 (dual* - dual(x)) <= 2 gap and ||x*||_L^2 = 2 dual* >= 2 dual(x).
    st.converged = st.gap <= 0.5 * eps * eps * st.dual || st.energy == 0.0;
    return st.converged;
  };
  certify(flow);
  res.trace.rows.push_back({0, st.gap, TraceRow{}.grad_sq, -1, elapsed()});
  if (st.converged || tree.off_tree().empty()) {
    // A tree carries the unique feasible flow.
    st.converged = true;
    return res;
  }

  CycleOracle oracle(tree, flow);
  const double m_off = static_cast<double>(st.off_tree_edges);
  std::uint64_t k = cfg.k0.value_or(static_cast<std::uint64_t>(std::ceil(std::sqrt(st.total_stretch * m_off))));
  k = std::max<std::uint64_t>(k, 1);
  Rng seeds(cfg.seed);
  const Vector zero(tree.off_tree().size(), 0.0);

  while (st.iterations < cfg.max_iters) {
    AcdmConfig ac;
    ac.alpha_exponent = 1.0;
    ac.sigma = 1.0;
    ac.mode = cfg.mode;
    ac.seed = seeds();
    ac.det_floor = cfg.det_floor;
    ac.stop = StopRule::gradient_window(k);
    ac.max_iters = 2 * k;
    ac.grad_stride = std::max<std::uint64_t>(1, (g.n + g.m()) / 4);
    AcdmEngine engine(oracle, ac);
    const AcdmResult run = engine.run(zero);
    const auto [c1, c2] = engine.y_coeffs();
    flow = oracle.flow_at(c1, c2);
    st.iterations += run.iterations;
    st.renormalizations += run.renormalizations;
    ++st.epochs;
    const bool done = certify(flow);
    res.trace.rows.push_back({st.iterations, st.gap, run.window_grad_sq, -1, elapsed()});
    if (done) break;
    oracle.set_base(flow);
    k *= 2;
  }
  return res;
}

}  // namespace acdm
