#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>

#include "acdm/alias_sampler.hpp"
#include "acdm/coefficients.hpp"
#include "acdm/mat2.hpp"
#include "acdm/oracle.hpp"
#include "acdm/rng.hpp"
#include "acdm/trace.hpp"
#include "acdm/weighted_norm.hpp"

namespace acdm {

struct StopRule {
  enum class Kind { Iterations, ValueGap, GradientWindow };
  Kind kind = Kind::Iterations;
  // ValueGap: stop once gap <= tol * initial gap (checked on the record stride).
  double tol = 0.0;
  // GradientWindow: stop at a uniform random iteration J in [k, 2k-1] and
  // return y_J.
  std::uint64_t window_k = 0;

  static StopRule iterations() { return {}; }
  static StopRule value_gap(double tol) { return {Kind::ValueGap, tol, 0}; }
  static StopRule gradient_window(std::uint64_t k) { return {Kind::GradientWindow, 0.0, k}; }
};

struct AcdmConfig {
  double alpha_exponent = 1.0;
  double sigma = 0.0;  // strong convexity in the L~^(1-alpha) weighted norm
  Mode mode = Mode::Stable;
  std::uint64_t max_iters = 1000;
  StopRule stop;
  std::uint64_t seed = 0;
  // Injected per-step perturbations of weighted norm exactly epsilon.
  std::optional<double> noise_epsilon;
  // 0 records only the first and last iterate (value-gap runs default to n).
  std::uint64_t record_stride = 0;
  std::optional<double> f_star;
  // |det B| below this triggers a change of basis back to B = I.
  double det_floor = 1e-7;
  // 0 means ceil(n/4).
  std::uint64_t grad_stride = 0;
};

// (v, y) = B (u, w).
struct ImplicitPair {
  Mat2 b;
  std::span<const double> u;
  std::span<const double> w;
};

std::pair<Vector, Vector> materialize(const ImplicitPair& pair);

struct StepEvent {
  std::uint64_t k;
  std::size_t coord;
  double partial;
};

struct AcdmResult {
  Vector x;
  ConvergenceTrace trace;
  std::uint64_t iterations = 0;
  std::uint64_t renormalizations = 0;
  std::optional<std::uint64_t> stop_iteration;  // J for gradient-window runs
  double final_gap = std::numeric_limits<double>::quiet_NaN();
  double window_grad_sq = std::numeric_limits<double>::quiet_NaN();
  bool stopped_by_monitor = false;
};

// The engine drives a CoordinateOracle through its two registers. It keeps
// (v_k, y_k) = B_k (u, w) and updates B_k by a 2x2 product each step, so an
// iteration costs one partial plus two coordinate increments.
class AcdmEngine {
 public:
  // Returns the optimality gap at x = cu*u + cw*w.
  using GapFunction = std::function<double(CoordinateOracle&, double cu, double cw)>;

  AcdmEngine(CoordinateOracle& oracle, AcdmConfig config);

  // Loads (x0, x0) into the registers, then reset_state().
  void reset(std::span<const double> x0);
  // B := I, coefficients and generator back to k = 0; registers untouched.
  void reset_state();
  std::size_t step();
  AcdmResult run(std::span<const double> x0);
  // Runs from whatever the registers hold, which must satisfy u = w.
  AcdmResult run_from_registers();

  std::uint64_t iteration() const { return coeff_.k; }
  const CoefficientState& coefficients() const { return coeff_; }
  const CoefficientState& next_coefficients() const { return next_; }
  const Mat2& basis() const { return b_; }
  const Thresholded& thresholds() const { return thr_; }
  const WeightedNorm& norm() const { return norm_; }
  std::uint64_t renormalizations() const { return renorms_; }
  Rng& rng() { return rng_; }

  // x_k, v_k, y_k as coefficient pairs on (u, w).
  std::pair<double, double> x_coeffs() const;
  // Plain mode keeps a single iterate in u, so all three are (1, 0) there.
  std::pair<double, double> v_coeffs() const;
  std::pair<double, double> y_coeffs() const;
  Vector current_x() const;
  Vector current_v() const;
  Vector current_y() const;

  void set_gap_function(GapFunction f) { gap_ = std::move(f); }
  void set_step_observer(std::function<void(const StepEvent&)> f) { observer_ = std::move(f); }
  // Called every `stride` iterations; returning true ends the run.
  void set_monitor(std::uint64_t stride, std::function<bool(AcdmEngine&)> f) {
    monitor_stride_ = stride;
    monitor_ = std::move(f);
  }

 private:
  double gap_at(double cu, double cw);
  double grad_sq_at_y();
  void inject_noise();
  void renormalize();

  CoordinateOracle& oracle_;
  AcdmConfig cfg_;
  Thresholded thr_;
  WeightedNorm norm_;
  AliasSampler sampler_;
  Rng rng_;
  CoefficientState coeff_;
  CoefficientState next_;
  Mat2 b_;
  std::uint64_t renorms_ = 0;
  GapFunction gap_;
  std::function<void(const StepEvent&)> observer_;
  std::uint64_t monitor_stride_ = 0;
  std::function<bool(AcdmEngine&)> monitor_;
};

}  // namespace acdm
