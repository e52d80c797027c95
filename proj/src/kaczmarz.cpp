#include "acdm/kaczmarz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "acdm/engine.hpp"
#include "acdm/errors.hpp"
#include "acdm/kernels.hpp"

namespace acdm {

ArkProblem::ArkProblem(CsrMatrix a_in, Vector b_in, double sigma)
    : a(std::move(a_in)), b(std::move(b_in)), row_norms_sq(a.rows()), sigma_dual(sigma) {
  if (b.size() != a.rows()) throw InputError("kaczmarz: rhs length does not match rows of A");
  if (a.rows() == 0) throw InputError("kaczmarz: A has no rows");
  for (std::size_t i = 0; i < a.rows(); ++i) {
    row_norms_sq[i] = a.row_norm_sq(i);
    if (!(row_norms_sq[i] > 0.0)) throw InputError("kaczmarz: row " + std::to_string(i) + " of A is zero");
    frobenius_sq += row_norms_sq[i];
  }
  if (!(sigma_dual > 0.0)) throw InputError("kaczmarz: sigma_dual must be > 0");
}

Vector ark_sampling_weights(const ArkProblem& p) {
  return thresholded_lipschitz(p.row_norms_sq, 1.0).sample_weights;
}

namespace {

double residual_norm(const ArkProblem& p, std::span<const double> x) {
  Vector r = multiply(p.a, x);
  kernels::axpy(-1.0, p.b, r);
  return std::sqrt(kernels::dot(r, r));
}

}  // namespace

ArkResult ark_run(const ArkProblem& p, std::span<const double> x0, const ArkConfig& cfg) {
  if (x0.size() != p.a.cols()) throw InputError("kaczmarz: x0 has wrong length");
  if (cfg.x_star && cfg.x_star->size() != p.a.cols()) throw InputError("kaczmarz: x* has wrong length");
  if (cfg.tol > 0.0 && !cfg.x_star) throw InputError("kaczmarz: tol stop needs x*");

  DualLeastSquaresOracle oracle(p.a, p.b);
  AcdmConfig ec;
  ec.alpha_exponent = 1.0;
  ec.sigma = p.sigma_dual;
  ec.mode = cfg.mode;
  ec.max_iters = cfg.max_iters;
  ec.seed = cfg.seed;
  ec.record_stride = cfg.record_stride;
  ec.det_floor = cfg.det_floor;
  if (cfg.tol > 0.0) {
    ec.stop = StopRule::value_gap(cfg.tol);
    if (ec.record_stride == 0) ec.record_stride = p.rows();
  }
  AcdmEngine engine(oracle, ec);

  if (cfg.x_star) {
    const Vector& xs = *cfg.x_star;
    engine.set_gap_function([&xs](CoordinateOracle& o, double cu, double cw) {
      const Vector x = static_cast<DualLeastSquaresOracle&>(o).primal_at(cu, cw);
      double s = 0.0;
      for (std::size_t j = 0; j < x.size(); ++j) s += (x[j] - xs[j]) * (x[j] - xs[j]);
      return 0.5 * s;
    });
  }

  const double b_norm = std::sqrt(kernels::dot(p.b, p.b));
  // Residuals are not monotone, so the plateau window must cover enough
  // iterations for the expected error to shrink by more than the condition
  // number (residual = A times error, up to that factor).
  const double m = static_cast<double>(p.rows());
  const double kappa = std::sqrt(p.frobenius_sq / p.sigma_dual);
  const double rate = cfg.mode == Mode::Plain ? 1.0 / (kappa * kappa) : 1.0 / (2.0 * std::sqrt(m) * kappa);
  const double window_iters = 2.0 * std::log(4.0 * std::sqrt(3.0) * kappa) / rate;
  const auto window_checks = std::max<std::uint64_t>(cfg.plateau_checks, static_cast<std::uint64_t>(std::ceil(window_iters / m)));
  double best = std::numeric_limits<double>::infinity();
  std::uint64_t stale = 0;
  bool inconsistent = false;
  bool converged_exactly = false;
  if (cfg.plateau_checks > 0) {
    engine.set_monitor(p.rows(), [&](AcdmEngine& e) {
      const auto [cu, cw] = e.x_coeffs();
      const double r = residual_norm(p, oracle.primal_at(cu, cw));
      if (!std::isfinite(r)) throw NumericalError("kaczmarz: residual became non-finite");
      if (r <= 1e-14 * std::max(1.0, b_norm)) {
        converged_exactly = true;
        return true;
      }
      if (r < best) {
        best = r;
        stale = 0;
        return false;
      }
      if (++stale < window_checks) return false;
      // A plateau at a residual this small is rounding, not inconsistency.
      if (best <= std::sqrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, b_norm)) {
        converged_exactly = true;
      } else {
        inconsistent = true;
      }
      return true;
    });
  }

  oracle.set_primal_registers(x0, x0);
  AcdmResult r = engine.run_from_registers();

  ArkResult out;
  const auto [cu, cw] = engine.x_coeffs();
  out.x = oracle.primal_at(cu, cw);
  out.trace = std::move(r.trace);
  out.iterations = r.iterations;
  out.residual_norm = residual_norm(p, out.x);
  if (inconsistent) {
    out.status = ArkStatus::Inconsistent;
  } else if (converged_exactly || (r.iterations < cfg.max_iters && !r.stopped_by_monitor)) {
    out.status = ArkStatus::Converged;
  } else {
    out.status = ArkStatus::MaxIterations;
  }
  return out;
}

}  // namespace acdm
