#include "acdm/engine.hpp"

#include <cmath>
#include <string>

#include "acdm/errors.hpp"

namespace acdm {

std::pair<Vector, Vector> materialize(const ImplicitPair& pair) {
  if (pair.u.size() != pair.w.size()) throw InputError("materialize: register length mismatch");
  Vector v(pair.u.size());
  Vector y(pair.u.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = pair.b.a * pair.u[i] + pair.b.b * pair.w[i];
    y[i] = pair.b.c * pair.u[i] + pair.b.d * pair.w[i];
  }
  return {std::move(v), std::move(y)};
}

namespace {

Thresholded plain_weights(std::span<const double> lipschitz, double alpha) {
  Thresholded t;
  t.l_tilde.assign(lipschitz.begin(), lipschitz.end());
  t.sample_weights.resize(lipschitz.size());
  t.s_tilde = 0.0;
  for (std::size_t i = 0; i < lipschitz.size(); ++i) {
    t.sample_weights[i] = alpha == 0.0 ? 1.0 : alpha == 1.0 ? lipschitz[i] : std::pow(lipschitz[i], alpha);
    t.s_tilde += t.sample_weights[i];
  }
  return t;
}

Thresholded make_thresholds(const CoordinateOracle& o, const AcdmConfig& cfg) {
  if (cfg.mode == Mode::Plain) {
    if (!(cfg.alpha_exponent >= 0.0 && cfg.alpha_exponent <= 1.0)) throw InputError("alpha exponent must lie in [0, 1]");
    return plain_weights(o.lipschitz_constants(), cfg.alpha_exponent);
  }
  return thresholded_lipschitz(o.lipschitz_constants(), cfg.alpha_exponent);
}

}  // namespace

AcdmEngine::AcdmEngine(CoordinateOracle& oracle, AcdmConfig config)
    : oracle_(oracle),
      cfg_(config),
      thr_(make_thresholds(oracle, config)),
      norm_(WeightedNorm::from_lipschitz(thr_.l_tilde, config.alpha_exponent)),
      sampler_(thr_.sample_weights) {
  if (cfg_.mode != Mode::Plain && !(cfg_.sigma > 0.0)) throw InputError("acdm: sigma must be > 0");
  if (!(cfg_.det_floor > 0.0 && cfg_.det_floor < 1.0)) throw InputError("acdm: det_floor must lie in (0, 1)");
  if (cfg_.stop.kind == StopRule::Kind::ValueGap && !(cfg_.stop.tol > 0.0)) {
    throw InputError("acdm: value-gap tolerance must be > 0");
  }
  if (cfg_.stop.kind == StopRule::Kind::GradientWindow && cfg_.stop.window_k == 0) {
    throw InputError("acdm: gradient window needs k >= 1");
  }
  if (cfg_.noise_epsilon && !(*cfg_.noise_epsilon >= 0.0)) throw InputError("acdm: noise epsilon must be >= 0");
  if (cfg_.grad_stride == 0) cfg_.grad_stride = (oracle_.dim() + 3) / 4;
  if (cfg_.stop.kind == StopRule::Kind::ValueGap && cfg_.record_stride == 0) cfg_.record_stride = oracle_.dim();
  const double sigma = cfg_.mode == Mode::Plain ? 1.0 : cfg_.sigma;
  coeff_ = initial_coefficients(oracle_.dim(), sigma, thr_.s_tilde, cfg_.mode);
  next_ = acdm::next_coefficients(coeff_);
}

void AcdmEngine::reset(std::span<const double> x0) {
  if (x0.size() != oracle_.dim()) throw InputError("acdm: x0 has wrong length");
  oracle_.set_registers(x0, x0);
  reset_state();
}

void AcdmEngine::reset_state() {
  rng_.seed(cfg_.seed);
  b_ = Mat2::identity();
  renorms_ = 0;
  const double sigma = cfg_.mode == Mode::Plain ? 1.0 : cfg_.sigma;
  coeff_ = initial_coefficients(oracle_.dim(), sigma, thr_.s_tilde, cfg_.mode);
  next_ = acdm::next_coefficients(coeff_);
}

std::pair<double, double> AcdmEngine::x_coeffs() const {
  if (cfg_.mode == Mode::Plain) return {1.0, 0.0};
  // y = alpha v + (1 - alpha) x
  const double al = coeff_.alpha;
  const double s = 1.0 / (1.0 - al);
  return {(b_.c - al * b_.a) * s, (b_.d - al * b_.b) * s};
}

std::pair<double, double> AcdmEngine::v_coeffs() const {
  if (cfg_.mode == Mode::Plain) return {1.0, 0.0};
  return {b_.a, b_.b};
}

std::pair<double, double> AcdmEngine::y_coeffs() const {
  if (cfg_.mode == Mode::Plain) return {1.0, 0.0};
  return {b_.c, b_.d};
}

Vector AcdmEngine::current_x() const {
  const auto [cu, cw] = x_coeffs();
  return oracle_.combine(cu, cw);
}

Vector AcdmEngine::current_v() const {
  const auto [cu, cw] = v_coeffs();
  return oracle_.combine(cu, cw);
}

Vector AcdmEngine::current_y() const {
  const auto [cu, cw] = y_coeffs();
  return oracle_.combine(cu, cw);
}

std::size_t AcdmEngine::step() {
  const std::size_t i = sampler_.sample(rng_);
  const double li = thr_.l_tilde[i];

  if (cfg_.mode == Mode::Plain) {
    const double g = oracle_.partial(i, 1.0, 0.0);
    if (!std::isfinite(g)) {
      throw NumericalError("non-finite partial at iteration " + std::to_string(coeff_.k) + ", coordinate " +
                           std::to_string(i));
    }
    if (observer_) observer_({coeff_.k, i, g});
    oracle_.increment(Register::U, i, -g / li);
    if (cfg_.noise_epsilon) inject_noise();
    coeff_ = next_;
    next_ = acdm::next_coefficients(coeff_);
    return i;
  }

  const double g = oracle_.partial(i, b_.c, b_.d);
  if (!std::isfinite(g)) {
    throw NumericalError("non-finite partial at iteration " + std::to_string(coeff_.k) + ", coordinate " +
                         std::to_string(i));
  }
  if (observer_) observer_({coeff_.k, i, g});

  const double beta = coeff_.beta;
  const double gamma = coeff_.gamma;
  const double a1 = next_.alpha;
  const Mat2 step_matrix{beta, 1.0 - beta, a1 * beta, 1.0 - a1 * beta};
  b_ = step_matrix * b_;

  const double sv = gamma * g / li;
  const double sy = (1.0 - a1 + a1 * gamma) * g / li;
  const Mat2 inv = b_.inverse();
  const double du = -(inv.a * sv + inv.b * sy);
  const double dw = -(inv.c * sv + inv.d * sy);
  if (du != 0.0) oracle_.increment(Register::U, i, du);
  if (dw != 0.0) oracle_.increment(Register::W, i, dw);

  if (cfg_.noise_epsilon) inject_noise();

  coeff_ = next_;
  next_ = acdm::next_coefficients(coeff_);

  if (std::abs(b_.det()) < cfg_.det_floor) renormalize();
  return i;
}

void AcdmEngine::inject_noise() {
  const double eps = *cfg_.noise_epsilon;
  if (eps == 0.0) return;
  const std::size_t n = oracle_.dim();
  auto draw = [&] {
    Vector e(n);
    for (double& x : e) x = standard_normal(rng_);
    const double s = eps / std::sqrt(norm_.norm_sq(e));
    for (double& x : e) x *= s;
    return e;
  };
  const Vector e1 = draw();  // perturbs x_{k+1}
  if (cfg_.mode == Mode::Plain) {
    oracle_.add_dense(Register::U, e1);
    return;
  }
  const Vector e2 = draw();  // perturbs v_{k+1}
  // b_ already holds B_{k+1}; alpha_{k+1} is next_.alpha until the caller
  // advances the schedule.
  const double a1 = next_.alpha;
  const Mat2 inv = b_.inverse();
  Vector du(n);
  Vector dw(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double dv = e2[j];
    const double dy = a1 * e2[j] + (1.0 - a1) * e1[j];
    du[j] = inv.a * dv + inv.b * dy;
    dw[j] = inv.c * dv + inv.d * dy;
  }
  oracle_.add_dense(Register::U, du);
  oracle_.add_dense(Register::W, dw);
}

void AcdmEngine::renormalize() {
  oracle_.change_basis(b_);
  b_ = Mat2::identity();
  ++renorms_;
}

double AcdmEngine::gap_at(double cu, double cw) {
  if (gap_) return gap_(oracle_, cu, cw);
  if (cfg_.f_star) return oracle_.value_at(cu, cw) - *cfg_.f_star;
  return std::numeric_limits<double>::quiet_NaN();
}

double AcdmEngine::grad_sq_at_y() {
  const Vector y = current_y();
  return norm_.dual_norm_sq(oracle_.gradient(y));
}

AcdmResult AcdmEngine::run(std::span<const double> x0) {
  reset(x0);
  return run_from_registers();
}

AcdmResult AcdmEngine::run_from_registers() {
  reset_state();
  AcdmResult res;
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - t0).count();
  };

  const bool window = cfg_.stop.kind == StopRule::Kind::GradientWindow;
  std::uint64_t last = cfg_.max_iters;
  std::uint64_t window_start = 0;
  if (window) {
    window_start = cfg_.stop.window_k;
    last = uniform_between(rng_, window_start, 2 * window_start - 1);
    res.stop_iteration = last;
  }

  const double gap0 = gap_at(x_coeffs().first, x_coeffs().second);
  res.trace.rows.push_back({0, gap0, window && window_start == 0 ? grad_sq_at_y() : TraceRow{}.grad_sq, -1, 0});

  double grad_sum = 0.0;
  std::uint64_t grad_count = 0;
  std::int64_t coord = -1;
  bool stopped = false;
  while (coeff_.k < last) {
    if (window && coeff_.k >= window_start && (coeff_.k - window_start) % cfg_.grad_stride == 0) {
      grad_sum += grad_sq_at_y();
      ++grad_count;
    }
    coord = static_cast<std::int64_t>(step());
    const std::uint64_t k = coeff_.k;
    if (monitor_ && monitor_stride_ != 0 && k % monitor_stride_ == 0 && monitor_(*this)) {
      res.stopped_by_monitor = true;
      break;
    }
    if (cfg_.record_stride != 0 && k % cfg_.record_stride == 0 && k != last) {
      const auto [cu, cw] = x_coeffs();
      const double gap = gap_at(cu, cw);
      res.trace.rows.push_back({k, gap, TraceRow{}.grad_sq, coord, elapsed()});
      if (cfg_.stop.kind == StopRule::Kind::ValueGap && gap <= cfg_.stop.tol * gap0) {
        stopped = true;
        break;
      }
    }
  }

  if (window) {
    // Return y_J; the window average covers the sampled iterations in [k, J].
    res.x = current_y();
    res.window_grad_sq = grad_count > 0 ? grad_sum / static_cast<double>(grad_count) : grad_sq_at_y();
    const auto [cu, cw] = y_coeffs();
    res.final_gap = gap_at(cu, cw);
    res.trace.rows.push_back({coeff_.k, res.final_gap, res.window_grad_sq, coord, elapsed()});
  } else {
    const auto [cu, cw] = x_coeffs();
    res.x = oracle_.combine(cu, cw);
    if (!stopped) {
      res.final_gap = gap_at(cu, cw);
      if (coeff_.k > 0 || res.trace.rows.empty()) {
        res.trace.rows.push_back({coeff_.k, res.final_gap, TraceRow{}.grad_sq, coord, elapsed()});
      }
    } else {
      res.final_gap = res.trace.rows.back().f_gap;
    }
  }
  res.iterations = coeff_.k;
  res.renormalizations = renorms_;
  return res;
}

}  // namespace acdm
