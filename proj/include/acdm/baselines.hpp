#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "acdm/alias_sampler.hpp"
#include "acdm/csr_matrix.hpp"
#include "acdm/oracle.hpp"
#include "acdm/rng.hpp"
#include "acdm/trace.hpp"

namespace acdm {

enum class Method { GD, AGD, CDM, CG, RK };

struct BaselineConfig {
  Method method = Method::GD;
  double L = 0.0;
  double sigma = 0.0;
  double alpha_exponent = 1.0;  // CDM sampling exponent
  std::uint64_t max_iters = 1000;
  std::uint64_t seed = 0;
  std::uint64_t record_stride = 1;
  std::optional<double> f_star;
  // Stop once f - f* <= tol * (f(x0) - f*); 0 disables. CG uses it as an
  // absolute residual tolerance.
  double tol = 0.0;
};

struct BaselineResult {
  Vector x;
  ConvergenceTrace trace;
  std::uint64_t iterations = 0;
};

// x - grad f(x) / L
Vector gd_step(const CoordinateOracle& oracle, std::span<const double> x, double L);
BaselineResult gd_run(const CoordinateOracle& oracle, std::span<const double> x0, const BaselineConfig& cfg);

// Nesterov's constant-step scheme for strongly convex f started with
// gamma_0 = L, which gives f(x_k) - f* <= L min{(1 - sqrt(sigma/L))^k, 4/(k+2)^2} ||x0 - x*||^2.
BaselineResult agd_run(const CoordinateOracle& oracle, std::span<const double> x0, const BaselineConfig& cfg);

// One coordinate step on register U: i ~ L_i^alpha, u_i -= f_i(u) / L_i.
std::size_t cdm_step(CoordinateOracle& oracle, const AliasSampler& sampler, Rng& rng);
AliasSampler cdm_sampler(const CoordinateOracle& oracle, double alpha);
BaselineResult cdm_run(CoordinateOracle& oracle, std::span<const double> x0, const BaselineConfig& cfg);

struct CgResult {
  Vector x;
  std::uint64_t iterations = 0;
  Vector residual_norms;  // ||b - A x_k|| for k = 0..iterations
  ConvergenceTrace trace;
};

// Plain conjugate gradient; stops when ||Ax - b|| <= tol.
CgResult cg_solve(const CsrMatrix& a, std::span<const double> b, std::span<const double> x0, double tol,
                  std::uint64_t max_iters, std::optional<double> f_star = std::nullopt);

// Row-action projections with rows drawn proportionally to ||a_i||^2.
class RandomizedKaczmarz {
 public:
  RandomizedKaczmarz(CsrMatrix a, Vector b);
  // Projects x onto the hyperplane of row i.
  void project(std::span<double> x, std::size_t i) const;
  std::size_t step(std::span<double> x, Rng& rng) const;
  const CsrMatrix& matrix() const { return a_; }

 private:
  CsrMatrix a_;
  Vector b_;
  Vector row_norms_sq_;
  AliasSampler sampler_;
};

// f_gap column records 1/2 ||x_k - x*||^2 when x_star is given.
BaselineResult rk_run(const RandomizedKaczmarz& rk, std::span<const double> x0, const BaselineConfig& cfg,
                      std::optional<Vector> x_star = std::nullopt);

}  // namespace acdm
