#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "acdm/rng.hpp"

namespace acdm {

// Walker/Vose alias table: O(n) build, O(1) draw.
class AliasSampler {
 public:
  AliasSampler() = default;
  explicit AliasSampler(std::span<const double> weights);

  std::size_t size() const { return prob_.size(); }
  std::size_t sample(Rng& rng) const;
  // Probability of category i recovered from the table alone.
  double probability(std::size_t i) const;
  std::span<const double> weights() const { return weights_; }

 private:
  std::vector<double> weights_;
  std::vector<double> prob_;
  std::vector<std::size_t> alias_;
};

inline std::size_t alias_sample(const AliasSampler& s, Rng& rng) { return s.sample(rng); }

}  // namespace acdm
