#include "acdm/alias_sampler.hpp"

#include <cmath>
#include <numeric>

#include "acdm/errors.hpp"

namespace acdm {

AliasSampler::AliasSampler(std::span<const double> weights)
    : weights_(weights.begin(), weights.end()), prob_(weights.size()), alias_(weights.size()) {
  const std::size_t n = weights.size();
  if (n == 0) throw InputError("alias sampler: empty weight vector");
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw InputError("alias sampler: weights must be finite and > 0");
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<double> scaled(n);
  std::vector<std::size_t> small;
  std::vector<std::size_t> large;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = weights[i] * static_cast<double>(n) / total;
    (scaled[i] < 1.0 ? small : large).push_back(i);
  }
  while (!small.empty() && !large.empty()) {
    const std::size_t s = small.back();
    small.pop_back();
    const std::size_t l = large.back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  // Leftovers are 1 up to rounding.
  for (std::size_t i : large) {
    prob_[i] = 1.0;
    alias_[i] = i;
  }
  for (std::size_t i : small) {
    prob_[i] = 1.0;
    alias_[i] = i;
  }
}

std::size_t AliasSampler::sample(Rng& rng) const {
  const std::size_t column = uniform_index(rng, prob_.size());
  return uniform01(rng) < prob_[column] ? column : alias_[column];
}

double AliasSampler::probability(std::size_t i) const {
  double mass = prob_[i];
  for (std::size_t j = 0; j < prob_.size(); ++j) {
    if (alias_[j] == i && j != i) mass += 1.0 - prob_[j];
  }
  return mass / static_cast<double>(prob_.size());
}

}  // namespace acdm
