#pragma once

#include <span>
#include <vector>

namespace acdm {

// ||x||^2 = sum_i w_i x_i^2 and its dual sum_i g_i^2 / w_i.
class WeightedNorm {
 public:
  explicit WeightedNorm(std::vector<double> weights);
  // w_i = L_i^(1-alpha)
  static WeightedNorm from_lipschitz(std::span<const double> lipschitz, double alpha);

  std::size_t size() const { return weights_.size(); }
  std::span<const double> weights() const { return weights_; }
  double norm_sq(std::span<const double> x) const;
  double dual_norm_sq(std::span<const double> g) const;

 private:
  std::vector<double> weights_;
};

double weighted_norm_sq(const WeightedNorm& w, std::span<const double> x);

}  // namespace acdm
