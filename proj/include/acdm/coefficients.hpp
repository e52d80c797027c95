#pragma once

#include <cstdint>
#include <span>

#include "acdm/csr_matrix.hpp"

namespace acdm {

enum class Mode {
  Simple,  // constant theta = sqrt(sigma / (2 S n))
  Stable,  // adaptive gamma schedule
  Plain,   // unaccelerated coordinate descent
};

struct Thresholded {
  Vector l_tilde;         // max(L_i, (S_alpha / n)^(1/alpha))
  Vector sample_weights;  // l_tilde^alpha
  double s_tilde = 0.0;   // sum of sample_weights
};

// alpha = 0 means uniform sampling: l_tilde = L, weights 1, s_tilde = n.
Thresholded thresholded_lipschitz(std::span<const double> lipschitz, double alpha);

struct CoefficientState {
  std::uint64_t k = 0;
  double gamma = 0.0;
  double beta = 0.0;
  double alpha = 0.0;
  // a_k and b_k grow geometrically; keep logs.
  double log_a = 0.0;
  double log_b = 0.0;
  std::size_t n = 0;
  double sigma = 0.0;
  double s_tilde = 0.0;
  double theta = 0.0;  // Simple mode only
  Mode mode = Mode::Stable;

  double gamma_cap() const;
};

// gamma_{k+1} from gamma_k, clamped into [gamma_k, cap].
double gamma_update(double gamma, std::size_t n, double sigma, double s_tilde);

// Coefficients for k = 0. Stable mode seeds gamma_{-1} = 1/(4n), a_0 = 1/(2n), b_0 = 2.
CoefficientState initial_coefficients(std::size_t n, double sigma, double s_tilde, Mode mode);
CoefficientState next_coefficients(const CoefficientState& s);

}  // namespace acdm
