#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>

#include "acdm/csr_matrix.hpp"
#include "acdm/engine.hpp"
#include "acdm/oracle.hpp"

namespace acdm {

// f(x) = (L - s)/4 [(1 - x_1)^2 + sum (x_i - x_{i+1})^2 + (x_n - q^(n+1))^2] + s/2 |x|^2
// with L = S1/n and q the root in (0, 1) of q^2 - 2 L/(L - s) q + 1 = 0, so
// that x*_k = q^k. As a quadratic: f = 1/2 x^T A x - b^T x + c with A
// tridiagonal, A_ii = L, A_{i,i+1} = -(L - s)/2.
struct HardInstance {
  std::size_t n = 0;
  double sigma = 0.0;
  double s1 = 0.0;
  double L = 0.0;
  double q = 0.0;
  CsrMatrix a;
  Vector b;
  double constant = 0.0;
  Vector x_star;

  // Full f including the constant.
  double value(std::span<const double> x) const;
  // min f including the constant.
  double f_star() const;
  // Optimum of 1/2 x^T A x - b^T x (what SpdQuadraticOracle reports).
  double oracle_f_star() const;
  SpdQuadraticOracle oracle() const { return SpdQuadraticOracle(a, b); }
};

// Requires S1 > 4 sigma n and sigma > 0.
HardInstance make_hard_instance(std::size_t n, double sigma, double s1);

// (sigma/2)(1 - 2 sqrt(2 sigma / (n S1)))^k |x* - x0|^2 - sqrt(sigma S1 / n)(1 - 1/2 sqrt(n sigma / S1))^(2n)
// for k = 0..k_max, valid for k <= n^2/2 under uniform sampling.
Vector lower_bound_curve(const HardInstance& inst, std::uint64_t k_max, std::span<const double> x0);
// Per-step decay exponent of the curve's leading term: -log(1 - 2 sqrt(2 sigma / (n S1))).
double lower_bound_exponent(const HardInstance& inst);

// Checks that iterates stay in anchor + span{e_i : coordinate i returned a
// nonzero partial}. For the hard instance with anchor 0 this is the
// zero-prefix pattern: x stays in R^j until coordinate j+1 is queried.
class SpanAudit {
 public:
  explicit SpanAudit(std::span<const double> anchor);

  // Initial point; must equal the anchor.
  void start(std::span<const double> x0);
  // A query at coordinate i returned partial p.
  void reveal(std::size_t i, double partial);
  // An iterate produced after the reveals so far.
  void check(std::span<const double> x);

  bool ok() const { return ok_; }
  std::uint64_t checks() const { return checks_; }
  // Number of leading coordinates revealed, i.e. the j with x in R^j.
  std::size_t prefix() const;
  std::size_t revealed_count() const;
  // Index of the first check that failed, or -1.
  std::int64_t first_violation() const { return first_violation_; }

 private:
  Vector anchor_;
  std::vector<bool> revealed_;
  bool ok_ = true;
  std::uint64_t checks_ = 0;
  std::int64_t first_violation_ = -1;
};

struct AuditedRun {
  AcdmResult run;
  bool span_ok = false;
  std::size_t prefix = 0;
  std::int64_t first_violation = -1;
};

// Runs the engine from x0 and audits x_k, v_k and y_k after every step.
AuditedRun audited_run(CoordinateOracle& oracle, const AcdmConfig& cfg, std::span<const double> x0,
                       std::span<const double> anchor);

void write_hard_instance(const std::filesystem::path& matrix_path, const std::filesystem::path& rhs_path,
                         const HardInstance& inst);

}  // namespace acdm
