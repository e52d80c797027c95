#include <doctest.h>

#include <acdm/baselines.hpp>
#include <acdm/engine.hpp>
#include <acdm/errors.hpp>
#include <acdm/kaczmarz.hpp>

#include <cmath>

#include "../support/instances.hpp"

using namespace acdm;

namespace {

double smallest_sv_sq(const CsrMatrix& a) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(testing::to_eigen(a));
  const auto& s = svd.singularValues();
  return s(s.size() - 1) * s(s.size() - 1);
}

CsrMatrix gaussian(std::size_t m, std::size_t n, Rng& rng) {
  Eigen::MatrixXd g(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = standard_normal(rng);
  }
  return testing::from_eigen(g);
}

}  // namespace

TEST_CASE("ark sampling weights") {
  const ArkProblem p(CsrMatrix::from_dense(2, 2, Vector{1, 0, 0, 2}), Vector{1, 2}, 1.0);
  CHECK(ark_sampling_weights(p) == Vector{2.5, 4});
  const ArkProblem eq(CsrMatrix::from_dense(3, 2, Vector{1, 0, 0, 1, -1, 0}), Vector{0, 0, 0}, 1.0);
  CHECK(ark_sampling_weights(eq) == Vector{1, 1, 1});
  const ArkProblem one(CsrMatrix::from_dense(1, 3, Vector{1, 2, 2}), Vector{1}, 9.0);
  CHECK(ark_sampling_weights(one) == Vector{9});
  CHECK_THROWS_AS(ArkProblem(CsrMatrix::from_dense(2, 1, Vector{1, 0}), Vector{1, 1}, 1.0), InputError);
}

TEST_CASE("orthonormal rows converge to machine precision") {
  const ArkProblem p(CsrMatrix::identity(2), Vector{1, 1}, 1.0);
  ArkConfig cfg;
  cfg.max_iters = 200;
  const auto r = ark_run(p, Vector{0, 0}, cfg);
  CHECK(std::abs(r.x[0] - 1.0) < 1e-13);
  CHECK(std::abs(r.x[1] - 1.0) < 1e-13);
  CHECK(r.status == ArkStatus::Converged);
}

TEST_CASE("plain mode reproduces randomized Kaczmarz bit for bit") {
  Rng rng(5);
  const CsrMatrix a = gaussian(60, 15, rng);
  const Vector xs = testing::random_vector(15, rng);
  const Vector b = multiply(a, xs);
  const ArkProblem p(a, b, smallest_sv_sq(a));
  ArkConfig cfg;
  cfg.mode = Mode::Plain;
  cfg.max_iters = 1500;
  cfg.seed = 31;
  cfg.record_stride = 1;
  cfg.x_star = xs;
  cfg.plateau_checks = 0;
  const auto ark = ark_run(p, Vector(15, 0.0), cfg);

  const RandomizedKaczmarz rk(a, b);
  BaselineConfig bc;
  bc.max_iters = 1500;
  bc.seed = 31;
  bc.record_stride = 1;
  const auto ref = rk_run(rk, Vector(15, 0.0), bc, xs);
  CHECK(ark.x == ref.x);
  REQUIRE(ark.trace.rows.size() == ref.trace.rows.size());
  bool same = true;
  for (std::size_t k = 0; k < ref.trace.rows.size(); ++k) {
    same = same && ark.trace.rows[k].f_gap == ref.trace.rows[k].f_gap && ark.trace.rows[k].coord == ref.trace.rows[k].coord;
  }
  CHECK(same);
}

TEST_CASE("primal registers track A^T of a naive dual run") {
  Rng rng(8);
  const std::size_t m = 25, n = 10;
  const CsrMatrix a = gaussian(m, n, rng);
  const Vector b = multiply(a, testing::random_vector(n, rng));
  const double sigma = smallest_sv_sq(a);
  for (Mode mode : {Mode::Simple, Mode::Stable}) {
    DualLeastSquaresOracle o(a, b);
    AcdmConfig cfg;
    cfg.sigma = sigma;
    cfg.mode = mode;
    cfg.seed = 3;
    AcdmEngine e(o, cfg);
    e.reset(Vector(m, 0.0));

    // Explicit dual iterates with every partial recomputed from scratch.
    const Thresholded thr = thresholded_lipschitz(o.lipschitz_constants(), 1.0);
    AliasSampler sampler(thr.sample_weights);
    Rng r(3);
    CoefficientState cur = initial_coefficients(m, sigma, thr.s_tilde, mode), nx = next_coefficients(cur);
    Vector x(m, 0.0), v(m, 0.0), y(m, 0.0);
    for (int k = 0; k < 1000; ++k) {
      const std::size_t i = sampler.sample(r);
      REQUIRE(e.step() == i);
      const Vector aty = multiply_transpose(a, y);
      const double g = a.row_dot(i, aty) - b[i];
      Vector xn = y;
      xn[i] -= g / thr.l_tilde[i];
      Vector vn(m);
      for (std::size_t j = 0; j < m; ++j) vn[j] = cur.beta * v[j] + (1 - cur.beta) * y[j];
      vn[i] -= cur.gamma * g / thr.l_tilde[i];
      for (std::size_t j = 0; j < m; ++j) y[j] = nx.alpha * vn[j] + (1 - nx.alpha) * xn[j];
      x = xn;
      v = vn;
      cur = nx;
      nx = next_coefficients(cur);
      if (k % 100 == 99) {
        const auto [cu, cw] = e.x_coeffs();
        const Vector primal = o.primal_at(cu, cw);
        const Vector shadow = multiply_transpose(a, x);
        for (std::size_t j = 0; j < n; ++j) CHECK(testing::rel_diff(primal[j], shadow[j]) < 1e-8);
      }
    }
  }
}

TEST_CASE("inconsistent systems are reported") {
  Rng rng(13);
  const CsrMatrix a = gaussian(40, 8, rng);
  const Vector b = testing::random_vector(40, rng);  // generic b is not in range(A)
  const ArkProblem p(a, b, smallest_sv_sq(a));
  ArkConfig cfg;
  cfg.max_iters = 2000000;
  const auto r = ark_run(p, Vector(8, 0.0), cfg);
  CHECK(r.status == ArkStatus::Inconsistent);
  CHECK(r.iterations < cfg.max_iters);
  CHECK(std::isfinite(r.residual_norm));
}

TEST_CASE("residual stays bounded for ill-conditioned consistent systems") {
  Rng rng(21);
  for (double cond : {10.0, 100.0, 1000.0}) {
    Eigen::MatrixXd g = testing::to_eigen(gaussian(80, 20, rng));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::VectorXd s(20);
    for (int i = 0; i < 20; ++i) s(i) = std::pow(cond, -i / 19.0);
    const CsrMatrix a = testing::from_eigen(svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose());
    const Vector xs = testing::random_vector(20, rng);
    const Vector b = multiply(a, xs);
    const ArkProblem p(a, b, smallest_sv_sq(a));
    ArkConfig cfg;
    cfg.max_iters = 20000;
    cfg.x_star = xs;
    cfg.record_stride = 500;
    const auto r = ark_run(p, Vector(20, 0.0), cfg);
    const double r0 = std::sqrt([&] {
      double t = 0;
      for (double v : b) t += v * v;
      return t;
    }());
    for (const auto& row : r.trace.rows) CHECK(std::isfinite(row.f_gap));
    CHECK(r.residual_norm <= 10.0 * r0);
    CHECK(r.status != ArkStatus::Inconsistent);
  }
}
