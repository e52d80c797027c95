#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "acdm/coefficients.hpp"
#include "acdm/csr_matrix.hpp"
#include "acdm/trace.hpp"

namespace acdm {

struct ArkProblem {
  CsrMatrix a;
  Vector b;
  Vector row_norms_sq;
  double frobenius_sq = 0.0;
  double sigma_dual = 0.0;  // smallest squared singular value of A

  ArkProblem(CsrMatrix a, Vector b, double sigma_dual);
  std::size_t rows() const { return a.rows(); }
};

// max(||a_i||^2, ||A||_F^2 / m)
Vector ark_sampling_weights(const ArkProblem& p);

enum class ArkStatus { Converged, MaxIterations, Inconsistent };

struct ArkConfig {
  Mode mode = Mode::Simple;
  std::uint64_t max_iters = 100000;
  std::uint64_t seed = 0;
  std::uint64_t record_stride = 0;
  // Enables the f_gap column 1/2 ||x - x*||^2 and the tol stop.
  std::optional<Vector> x_star;
  // Stop once ||x - x*||^2 <= tol ||x0 - x*||^2 (needs x_star).
  double tol = 0.0;
  // Residual ||Ax - b|| is checked every m iterations. A run of checks with no
  // new best residual flags the system as inconsistent; the run length is
  // this value or the number of checks the predicted rate needs to beat the
  // condition number, whichever is larger. 0 disables.
  std::uint64_t plateau_checks = 5;
  double det_floor = 1e-7;
};

struct ArkResult {
  Vector x;
  ConvergenceTrace trace;
  std::uint64_t iterations = 0;
  ArkStatus status = ArkStatus::MaxIterations;
  double residual_norm = 0.0;
};

// x0 must lie in the row space of A (0 always does).
ArkResult ark_run(const ArkProblem& p, std::span<const double> x0, const ArkConfig& cfg);

}  // namespace acdm
