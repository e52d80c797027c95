#pragma once

// Straightforward O(n)-per-step ACDM on an explicit quadratic, used as the
// reference for the implicit engine.

#include <acdm/alias_sampler.hpp>
#include <acdm/coefficients.hpp>
#include <acdm/csr_matrix.hpp>
#include <acdm/rng.hpp>

#include <vector>

namespace acdm::testing {

struct NaiveAcdm {
  const CsrMatrix& a;
  Vector b;
  Thresholded thr;
  AliasSampler sampler;
  Rng rng;
  CoefficientState cur;
  CoefficientState next;
  Vector x, v, y;
  std::vector<std::size_t> coords;

  NaiveAcdm(const CsrMatrix& a_, Vector b_, double alpha, double sigma, Mode mode, std::uint64_t seed,
            const Vector& x0)
      : a(a_),
        b(std::move(b_)),
        thr(thresholded_lipschitz(a_.diagonal_values(), alpha)),
        sampler(thr.sample_weights),
        rng(seed),
        cur(initial_coefficients(a_.rows(), sigma, thr.s_tilde, mode)),
        next(next_coefficients(cur)),
        x(x0),
        v(x0),
        y(x0) {}

  void step() {
    const std::size_t i = sampler.sample(rng);
    coords.push_back(i);
    const double g = a.row_dot(i, y) - b[i];
    const double li = thr.l_tilde[i];
    Vector xn = y;
    xn[i] -= g / li;
    Vector vn(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) vn[j] = cur.beta * v[j] + (1.0 - cur.beta) * y[j];
    vn[i] -= cur.gamma * g / li;
    const double a1 = next.alpha;
    for (std::size_t j = 0; j < v.size(); ++j) y[j] = a1 * vn[j] + (1.0 - a1) * xn[j];
    x = std::move(xn);
    v = std::move(vn);
    cur = next;
    next = next_coefficients(cur);
  }
};

}  // namespace acdm::testing
