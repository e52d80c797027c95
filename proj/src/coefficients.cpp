#include "acdm/coefficients.hpp"

#include <algorithm>
#include <cmath>

#include "acdm/errors.hpp"

namespace acdm {

Thresholded thresholded_lipschitz(std::span<const double> lipschitz, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InputError("alpha exponent must lie in [0, 1]");
  const std::size_t n = lipschitz.size();
  if (n == 0) throw InputError("thresholded_lipschitz: empty input");
  for (double l : lipschitz) {
    if (!(l > 0.0) || !std::isfinite(l)) throw InputError("thresholded_lipschitz: L_i must be finite and > 0");
  }
  Thresholded t;
  t.l_tilde.assign(lipschitz.begin(), lipschitz.end());
  t.sample_weights.assign(n, 1.0);
  if (alpha == 0.0) {
    t.s_tilde = static_cast<double>(n);
    return t;
  }
  double s_alpha = 0.0;
  for (double l : lipschitz) s_alpha += std::pow(l, alpha);
  const double floor_l = std::pow(s_alpha / static_cast<double>(n), 1.0 / alpha);
  t.s_tilde = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    t.l_tilde[i] = std::max(lipschitz[i], floor_l);
    t.sample_weights[i] = alpha == 1.0 ? t.l_tilde[i] : std::pow(t.l_tilde[i], alpha);
    t.s_tilde += t.sample_weights[i];
  }
  return t;
}

double CoefficientState::gamma_cap() const {
  return std::sqrt(s_tilde / (2.0 * static_cast<double>(n) * sigma));
}

double gamma_update(double gamma, std::size_t n, double sigma, double s_tilde) {
  const double cap = std::sqrt(s_tilde / (2.0 * static_cast<double>(n) * sigma));
  if (gamma >= cap) return cap;
  // Positive root of g^2 - t g - gamma^2 = 0; the second form avoids
  // cancellation when t < 0.
  const double t = 1.0 / (2.0 * static_cast<double>(n)) - gamma * gamma * sigma / s_tilde;
  const double r = std::sqrt(t * t + 4.0 * gamma * gamma);
  const double g = t >= 0.0 ? 0.5 * (t + r) : 2.0 * gamma * gamma / (r - t);
  return std::clamp(g, gamma, cap);
}

namespace {

void fill_beta_alpha(CoefficientState& s) {
  s.beta = 1.0 - s.gamma * s.sigma / s.s_tilde;
  s.alpha = s.beta / (s.beta + 2.0 * static_cast<double>(s.n) * s.gamma - 1.0);
}

}  // namespace

CoefficientState initial_coefficients(std::size_t n, double sigma, double s_tilde, Mode mode) {
  if (n == 0) throw InputError("coefficients: n must be positive");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InputError("coefficients: sigma must be finite and > 0");
  if (!(s_tilde > 0.0)) throw InputError("coefficients: S~ must be > 0");
  if (sigma > 2.0 * static_cast<double>(n) * s_tilde) {
    throw InputError("coefficients: sigma exceeds 2 n S~; the schedule is undefined");
  }
  CoefficientState s;
  s.n = n;
  s.sigma = sigma;
  s.s_tilde = s_tilde;
  s.mode = mode;
  s.log_a = std::log(1.0 / (2.0 * static_cast<double>(n)));
  s.log_b = std::log(2.0);
  s.theta = std::sqrt(sigma / (2.0 * s_tilde * static_cast<double>(n)));
  switch (mode) {
    case Mode::Stable:
      s.gamma = gamma_update(1.0 / (4.0 * static_cast<double>(n)), n, sigma, s_tilde);
      fill_beta_alpha(s);
      break;
    case Mode::Simple:
      s.gamma = s.gamma_cap();
      s.beta = 1.0 - s.theta;
      s.alpha = s.theta / (1.0 + s.theta);
      break;
    case Mode::Plain:
      s.gamma = 0.0;
      s.beta = 1.0;
      s.alpha = 0.0;
      break;
  }
  return s;
}

CoefficientState next_coefficients(const CoefficientState& s) {
  CoefficientState next = s;
  next.k = s.k + 1;
  if (s.mode != Mode::Stable) return next;
  next.log_b = s.log_b - 0.5 * std::log(s.beta);
  next.log_a = std::log(s.gamma) + next.log_b;
  next.gamma = gamma_update(s.gamma, s.n, s.sigma, s.s_tilde);
  fill_beta_alpha(next);
  return next;
}

}  // namespace acdm
