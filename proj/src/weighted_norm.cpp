#include "acdm/weighted_norm.hpp"

#include <cmath>

#include "acdm/errors.hpp"

namespace acdm {

WeightedNorm::WeightedNorm(std::vector<double> weights) : weights_(std::move(weights)) {
  for (double w : weights_) {
    if (!(w > 0.0) || !std::isfinite(w)) throw InputError("weighted norm: weights must be finite and > 0");
  }
}

WeightedNorm WeightedNorm::from_lipschitz(std::span<const double> lipschitz, double alpha) {
  std::vector<double> w(lipschitz.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!(lipschitz[i] > 0.0)) throw InputError("weighted norm: Lipschitz constants must be > 0");
    w[i] = alpha == 1.0 ? 1.0 : std::pow(lipschitz[i], 1.0 - alpha);
  }
  return WeightedNorm(std::move(w));
}

double WeightedNorm::norm_sq(std::span<const double> x) const {
  if (x.size() != weights_.size()) throw InputError("weighted norm: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += weights_[i] * x[i] * x[i];
  return s;
}

double WeightedNorm::dual_norm_sq(std::span<const double> g) const {
  if (g.size() != weights_.size()) throw InputError("weighted norm: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += g[i] * g[i] / weights_[i];
  return s;
}

double weighted_norm_sq(const WeightedNorm& w, std::span<const double> x) { return w.norm_sq(x); }

}  // namespace acdm
