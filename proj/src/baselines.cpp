#include "acdm/baselines.hpp"

#include <chrono>
#include <cmath>

#include "acdm/errors.hpp"
#include "acdm/kernels.hpp"

namespace acdm {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t ns_since(Clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count();
}

double gap_of(const CoordinateOracle& o, std::span<const double> x, const BaselineConfig& cfg) {
  return cfg.f_star ? o.value(x) - *cfg.f_star : std::numeric_limits<double>::quiet_NaN();
}

bool record_due(std::uint64_t k, const BaselineConfig& cfg) {
  return cfg.record_stride != 0 && k % cfg.record_stride == 0;
}

// Records iteration k if due; returns true when the relative tolerance is met.
bool observe(BaselineResult& r, const CoordinateOracle& o, std::span<const double> x, std::uint64_t k,
             std::int64_t coord, const BaselineConfig& cfg, Clock::time_point t0, double gap0) {
  if (!record_due(k, cfg)) return false;
  const double gap = gap_of(o, x, cfg);
  r.trace.rows.push_back({k, gap, std::numeric_limits<double>::quiet_NaN(), coord, ns_since(t0)});
  return cfg.tol > 0.0 && gap <= cfg.tol * gap0;
}

void finish(BaselineResult& r, const CoordinateOracle& o, std::uint64_t k, std::int64_t coord,
            const BaselineConfig& cfg, Clock::time_point t0) {
  r.iterations = k;
  if (r.trace.rows.empty() || r.trace.rows.back().k != k) {
    r.trace.rows.push_back({k, gap_of(o, r.x, cfg), std::numeric_limits<double>::quiet_NaN(), coord, ns_since(t0)});
  }
}

void check_x0(const CoordinateOracle& o, std::span<const double> x0) {
  if (x0.size() != o.dim()) throw InputError("baseline: x0 has wrong length");
}

}  // namespace

Vector gd_step(const CoordinateOracle& oracle, std::span<const double> x, double L) {
  if (!(L > 0.0)) throw InputError("gd: L must be > 0");
  Vector g = oracle.gradient(x);
  Vector out(x.begin(), x.end());
  kernels::axpy(-1.0 / L, g, out);
  return out;
}

BaselineResult gd_run(const CoordinateOracle& oracle, std::span<const double> x0, const BaselineConfig& cfg) {
  check_x0(oracle, x0);
  const auto t0 = Clock::now();
  BaselineResult r;
  r.x.assign(x0.begin(), x0.end());
  const double gap0 = gap_of(oracle, r.x, cfg);
  r.trace.rows.push_back({0, gap0, std::numeric_limits<double>::quiet_NaN(), -1, 0});
  std::uint64_t k = 0;
  while (k < cfg.max_iters) {
    r.x = gd_step(oracle, r.x, cfg.L);
    ++k;
    if (observe(r, oracle, r.x, k, -1, cfg, t0, gap0)) break;
  }
  finish(r, oracle, k, -1, cfg, t0);
  return r;
}

BaselineResult agd_run(const CoordinateOracle& oracle, std::span<const double> x0, const BaselineConfig& cfg) {
  check_x0(oracle, x0);
  if (!(cfg.sigma > 0.0) || !(cfg.L > 0.0)) throw InputError("agd: need 0 < sigma <= L");
  if (cfg.sigma > cfg.L) throw InputError("agd: sigma exceeds L");
  const auto t0 = Clock::now();
  const double q = cfg.sigma / cfg.L;
  BaselineResult r;
  r.x.assign(x0.begin(), x0.end());
  Vector y = r.x;
  // a_0 solves a^2 + (1 - q) a - 1 = 0.
  double a = 0.5 * (-(1.0 - q) + std::sqrt((1.0 - q) * (1.0 - q) + 4.0));
  const double gap0 = gap_of(oracle, r.x, cfg);
  r.trace.rows.push_back({0, gap0, std::numeric_limits<double>::quiet_NaN(), -1, 0});
  std::uint64_t k = 0;
  while (k < cfg.max_iters) {
    Vector xn = gd_step(oracle, y, cfg.L);
    const double t = a * a - q;
    const double an = 0.5 * (-t + std::sqrt(t * t + 4.0 * a * a));
    const double mom = a * (1.0 - a) / (a * a + an);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = xn[i] + mom * (xn[i] - r.x[i]);
    r.x = std::move(xn);
    a = an;
    ++k;
    if (observe(r, oracle, r.x, k, -1, cfg, t0, gap0)) break;
  }
  finish(r, oracle, k, -1, cfg, t0);
  return r;
}

AliasSampler cdm_sampler(const CoordinateOracle& oracle, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InputError("cdm: alpha exponent must lie in [0, 1]");
  Vector w(oracle.dim());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = alpha == 0.0 ? 1.0 : std::pow(oracle.lipschitz(i), alpha);
  return AliasSampler(w);
}

std::size_t cdm_step(CoordinateOracle& oracle, const AliasSampler& sampler, Rng& rng) {
  const std::size_t i = sampler.sample(rng);
  const double g = oracle.partial(i, 1.0, 0.0);
  if (!std::isfinite(g)) throw NumericalError("cdm: non-finite partial at coordinate " + std::to_string(i));
  oracle.increment(Register::U, i, -g / oracle.lipschitz(i));
  return i;
}

BaselineResult cdm_run(CoordinateOracle& oracle, std::span<const double> x0, const BaselineConfig& cfg) {
  check_x0(oracle, x0);
  const auto t0 = Clock::now();
  const AliasSampler sampler = cdm_sampler(oracle, cfg.alpha_exponent);
  Rng rng(cfg.seed);
  oracle.set_registers(x0, x0);
  BaselineResult r;
  const double gap0 = gap_of(oracle, x0, cfg);
  r.trace.rows.push_back({0, gap0, std::numeric_limits<double>::quiet_NaN(), -1, 0});
  std::uint64_t k = 0;
  std::int64_t coord = -1;
  while (k < cfg.max_iters) {
    coord = static_cast<std::int64_t>(cdm_step(oracle, sampler, rng));
    ++k;
    if (record_due(k, cfg) && observe(r, oracle, oracle.u(), k, coord, cfg, t0, gap0)) break;
  }
  r.x.assign(oracle.u().begin(), oracle.u().end());
  finish(r, oracle, k, coord, cfg, t0);
  return r;
}

CgResult cg_solve(const CsrMatrix& a, std::span<const double> b, std::span<const double> x0, double tol,
                  std::uint64_t max_iters, std::optional<double> f_star) {
  if (a.rows() != a.cols() || b.size() != a.rows() || x0.size() != a.rows()) {
    throw InputError("cg: dimension mismatch");
  }
  if (!(tol >= 0.0)) throw InputError("cg: tolerance must be >= 0");
  const auto t0 = Clock::now();
  auto fgap = [&](std::span<const double> x) {
    if (!f_star) return std::numeric_limits<double>::quiet_NaN();
    const Vector ax = multiply(a, x);
    return 0.5 * kernels::dot(x, ax) - kernels::dot(b, x) - *f_star;
  };
  CgResult res;
  res.x.assign(x0.begin(), x0.end());
  Vector r(b.begin(), b.end());
  kernels::axpy(-1.0, multiply(a, res.x), r);
  Vector p = r;
  double rr = kernels::dot(r, r);
  res.residual_norms.push_back(std::sqrt(rr));
  res.trace.rows.push_back({0, fgap(res.x), rr, -1, 0});
  Vector ap(a.rows());
  while (res.iterations < max_iters && std::sqrt(rr) > tol) {
    multiply(a, p, ap);
    const double pap = kernels::dot(p, ap);
    if (!(pap > 0.0)) {
      throw NumericalError("cg: breakdown, p^T A p = " + std::to_string(pap) + " at iteration " +
                           std::to_string(res.iterations));
    }
    const double step = rr / pap;
    kernels::axpy(step, p, res.x);
    kernels::axpy(-step, ap, r);
    const double rr_new = kernels::dot(r, r);
    const double beta = rr_new / rr;
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = r[i] + beta * p[i];
    rr = rr_new;
    ++res.iterations;
    res.residual_norms.push_back(std::sqrt(rr));
    res.trace.rows.push_back({res.iterations, fgap(res.x), rr, -1, ns_since(t0)});
  }
  return res;
}

RandomizedKaczmarz::RandomizedKaczmarz(CsrMatrix a, Vector b)
    : a_(std::move(a)), b_(std::move(b)), row_norms_sq_(a_.rows()) {
  if (b_.size() != a_.rows()) throw InputError("rk: rhs length does not match rows of A");
  for (std::size_t i = 0; i < a_.rows(); ++i) {
    row_norms_sq_[i] = a_.row_norm_sq(i);
    if (!(row_norms_sq_[i] > 0.0)) throw InputError("rk: row " + std::to_string(i) + " of A is zero");
  }
  sampler_ = AliasSampler(row_norms_sq_);
}

void RandomizedKaczmarz::project(std::span<double> x, std::size_t i) const {
  const RowView row = a_.row(i);
  double d = 0.0;
  for (std::size_t k = 0; k < row.cols.size(); ++k) d += row.values[k] * x[row.cols[k]];
  // Same operation order as a unit dual coordinate step.
  const double g = d - b_[i];
  const double t = -g / row_norms_sq_[i];
  for (std::size_t k = 0; k < row.cols.size(); ++k) x[row.cols[k]] += t * row.values[k];
}

std::size_t RandomizedKaczmarz::step(std::span<double> x, Rng& rng) const {
  const std::size_t i = sampler_.sample(rng);
  project(x, i);
  return i;
}

BaselineResult rk_run(const RandomizedKaczmarz& rk, std::span<const double> x0, const BaselineConfig& cfg,
                      std::optional<Vector> x_star) {
  if (x0.size() != rk.matrix().cols()) throw InputError("rk: x0 has wrong length");
  if (x_star && x_star->size() != x0.size()) throw InputError("rk: x* has wrong length");
  const auto t0 = Clock::now();
  auto err = [&](std::span<const double> x) {
    if (!x_star) return std::numeric_limits<double>::quiet_NaN();
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) s += (x[j] - (*x_star)[j]) * (x[j] - (*x_star)[j]);
    return 0.5 * s;
  };
  Rng rng(cfg.seed);
  BaselineResult r;
  r.x.assign(x0.begin(), x0.end());
  const double e0 = err(r.x);
  r.trace.rows.push_back({0, e0, std::numeric_limits<double>::quiet_NaN(), -1, 0});
  std::uint64_t k = 0;
  std::int64_t coord = -1;
  while (k < cfg.max_iters) {
    coord = static_cast<std::int64_t>(rk.step(r.x, rng));
    ++k;
    if (record_due(k, cfg)) {
      const double e = err(r.x);
      r.trace.rows.push_back({k, e, std::numeric_limits<double>::quiet_NaN(), coord, ns_since(t0)});
      if (cfg.tol > 0.0 && e <= cfg.tol * e0) break;
    }
  }
  r.iterations = k;
  if (r.trace.rows.back().k != k) r.trace.rows.push_back({k, err(r.x), std::numeric_limits<double>::quiet_NaN(), coord, ns_since(t0)});
  return r;
}

}  // namespace acdm
