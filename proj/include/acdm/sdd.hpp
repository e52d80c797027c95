#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

#include "acdm/coefficients.hpp"
#include "acdm/graph.hpp"
#include "acdm/oracle.hpp"
#include "acdm/trace.hpp"

namespace acdm {

// Checks that the demands sum to zero (relative to their l1 norm, 1e-12)
// and returns them with the mean removed.
Vector exact_demands(std::span<const double> chi);

// A flow z with B^T z = chi. Off-tree edges hold explicit values; tree-edge
// values live in a TreePathStructure as upward flows. The cycle of off-tree
// edge e = (a -> b) is +1 on e plus the tree path b -> a.
class FlowState {
 public:
  // Routes chi over the tree alone (zero off-tree flow).
  FlowState(const SpanningTree& t, std::span<const double> chi);

  const SpanningTree& tree() const { return *t_; }
  std::span<const double> demands() const { return chi_; }
  // Indexed by off-tree index.
  std::span<const double> off_tree_flows() const { return off_; }

  // Sum over the cycle of e of r * z, signed along the cycle. O(log^2 n).
  double cycle_sum(std::size_t e) const;
  double cycle_sum_at(std::size_t k) const;  // k = off-tree index
  // Pushes t units around the cycle of e.
  void add_cycle(std::size_t e, double t);
  void add_cycle_at(std::size_t k, double t);

  // Replaces the off-tree flows and re-derives tree flows from chi, which
  // restores conservation to rounding.
  void set_off_tree_flows(std::span<const double> off);
  void rederive() { set_off_tree_flows(Vector(off_)); }

  Vector upward_flows() const { return path_.upward_flows(); }
  // Per edge, in the edge's u -> v orientation.
  Vector edge_flows() const;
  // 1/2 sum r z^2
  double energy() const;
  // All cycle sums at once in O(n + m).
  Vector all_cycle_sums() const;

 private:
  const SpanningTree* t_;
  Vector chi_;
  Vector off_;
  TreePathStructure path_;
};

inline FlowState initial_tree_flow(const SpanningTree& t, std::span<const double> chi) { return FlowState(t, chi); }
// Throws InputError for a tree edge.
double cycle_partial(const FlowState& s, std::size_t e);
// Exact minimisation of the energy along the cycle of e; returns the amount
// pushed.
double cycle_update(FlowState& s, std::size_t e);

// Upward tree flows (indexed by child vertex) for demands chi with the given
// off-tree flows.
Vector tree_flows_for(const SpanningTree& t, std::span<const double> chi, std::span<const double> off);
// x(root) = 0, x(child) = x(parent) + r * zup(child), then mean zero.
Vector potentials_from_flow(const SpanningTree& t, std::span<const double> zup);
// chi^T x - 1/2 x^T L x
double dual_objective(const WeightedGraph& g, std::span<const double> chi, std::span<const double> x);
// Residual B^T z - chi in the max norm.
double conservation_error(const WeightedGraph& g, std::span<const double> z, std::span<const double> chi);
double flow_energy(const WeightedGraph& g, std::span<const double> z);

// Cycle objective over off-tree coordinates in rescaled units
// y~_e = sqrt(r_e) * y_e, where y_e is the flow pushed around the cycle of e:
// f(y~) = energy(base + sum_e y_e c_e). Coordinate Lipschitz constants are
// st(e) + 1 and f is 1-strongly convex in the Euclidean norm. Each register
// is kept as a circulation with its own path structure.
class CycleOracle final : public CoordinateOracle {
 public:
  CycleOracle(const SpanningTree& t, FlowState base);

  const FlowState& base() const { return base_; }
  void set_base(FlowState base);
  // base + c1 * C u + c2 * C w with tree flows re-derived exactly.
  FlowState flow_at(double c1, double c2) const;

  double value(std::span<const double> y) const override;
  Vector gradient(std::span<const double> y) const override;

 protected:
  double do_partial(std::size_t k, double c1, double c2) const override;
  void do_increment(Register r, std::size_t k, double delta) override;
  void do_rebuild() override;

 private:
  FlowState flow_for(std::span<const double> y) const;

  const SpanningTree* t_;
  Vector inv_sqrt_r_;
  FlowState base_;
  FlowState cu_;
  FlowState cw_;
};

struct LaplacianSolveConfig {
  TreeStrategy strategy = TreeStrategy::MinResistance;
  Mode mode = Mode::Stable;
  std::uint64_t seed = 0;
  // First window length; later epochs double it. Default ceil(sqrt(S1 * m')).
  std::optional<std::uint64_t> k0;
  std::uint64_t max_iters = 200'000'000;
  double det_floor = 1e-7;
};

struct LaplacianSolveStats {
  std::uint64_t iterations = 0;
  std::uint64_t epochs = 0;
  std::uint64_t renormalizations = 0;
  std::size_t off_tree_edges = 0;
  double total_stretch = 0.0;  // S1
  double energy = 0.0;
  double dual = 0.0;
  double gap = 0.0;
  bool converged = false;
};

struct LaplacianSolveResult {
  Vector potentials;  // mean zero
  Vector flow;        // per edge, u -> v orientation
  ConvergenceTrace trace;
  LaplacianSolveStats stats;
};

// Solves L x = chi. Epochs run the accelerated engine for a random number of
// steps in [k, 2k-1] from the previous epoch's flow, doubling k, until the
// duality gap certifies ||x - x*||_L <= eps ||x*||_L.
LaplacianSolveResult solve_laplacian(const WeightedGraph& g, std::span<const double> chi, double eps,
                                     const LaplacianSolveConfig& cfg = {});

}  // namespace acdm
