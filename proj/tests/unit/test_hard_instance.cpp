#include <doctest.h>

#include <acdm/engine.hpp>
#include <acdm/errors.hpp>
#include <acdm/hard_instance.hpp>
#include <acdm/matrix_market.hpp>

#include <cmath>
#include <filesystem>

#include "../support/instances.hpp"

using namespace acdm;

TEST_CASE("two-dimensional example against a direct solve") {
  const HardInstance h = make_hard_instance(2, 0.1, 2.0);
  CHECK(h.L == doctest::Approx(1.0));
  const double kappa = 1.0 / 0.9;
  CHECK(h.q == doctest::Approx(kappa - std::sqrt(kappa * kappa - 1.0)).epsilon(1e-14));
  CHECK(h.q == doctest::Approx(0.62679).epsilon(1e-5));
  // Optimality system of f written out by hand: (L-s)/2 (2x1 - 1 - x2) + s x1 = 0,
  // (L-s)/2 (2x2 - x1 - q^3) + s x2 = 0.
  const double c = 0.45, s = 0.1, q3 = h.q * h.q * h.q;
  Eigen::Matrix2d m;
  m << 2 * c + s, -c, -c, 2 * c + s;
  const Eigen::Vector2d rhs(c, c * q3);
  const Eigen::Vector2d x = m.lu().solve(rhs);
  CHECK(h.x_star[0] == doctest::Approx(x(0)).epsilon(1e-12));
  CHECK(h.x_star[1] == doctest::Approx(x(1)).epsilon(1e-12));
  CHECK(h.x_star[0] == doctest::Approx(0.62679).epsilon(1e-5));
  CHECK(h.x_star[1] == doctest::Approx(0.39287).epsilon(1e-4));
}

TEST_CASE("analytic optimum has zero gradient") {
  for (std::size_t n : {2u, 10u, 50u, 2000u}) {
    const HardInstance h = make_hard_instance(n, 0.01, 5.0 * 0.01 * static_cast<double>(n));
    const SpdQuadraticOracle o = h.oracle();
    const Vector g = o.gradient(h.x_star);
    double norm = 0.0;
    for (double gi : g) norm += gi * gi;
    CHECK(std::sqrt(norm) < 1e-10);
    for (std::size_t i = 0; i < n; ++i) CHECK(o.lipschitz(i) == doctest::Approx(h.L));
    CHECK(h.value(h.x_star) == doctest::Approx(o.value(h.x_star) + h.constant).epsilon(1e-12));
    CHECK(h.oracle_f_star() == doctest::Approx(o.value(h.x_star)).epsilon(1e-12));
  }
  // Tiny boundary term underflows to zero without breaking the instance.
  const HardInstance big = make_hard_instance(3000, 0.2, 3000.0);
  CHECK(big.b.back() == 0.0);
  CHECK(std::isfinite(big.f_star()));
}

TEST_CASE("q bounds, strong convexity and the small-sigma limit") {
  Rng rng(21);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 2 + uniform_index(rng, 60);
    const double sigma = std::exp(-6.0 * uniform01(rng));
    const double s1 = 4.0 * sigma * static_cast<double>(n) * (1.0 + 10.0 * uniform01(rng)) + 1e-9;
    const HardInstance h = make_hard_instance(n, sigma, s1);
    CHECK(h.q >= 1.0 - std::sqrt(2.0 * sigma / h.L));
    CHECK(h.q <= 1.0 - 0.5 * std::sqrt(sigma / h.L));
    const Eigen::MatrixXd a = testing::to_eigen(h.a);
    for (int t = 0; t < 5; ++t) {
      const Eigen::VectorXd v = testing::to_eigen(testing::random_vector(n, rng));
      const double quad = v.dot(a * v);
      CHECK(quad >= sigma * v.squaredNorm() * (1 - 1e-12));
      CHECK(quad <= (h.L + 2 * (h.L - sigma)) * v.squaredNorm() * (1 + 1e-12));
    }
  }
  const HardInstance loose = make_hard_instance(20, 1e-8, 1.0);
  CHECK(loose.q > 0.999);
  CHECK(loose.x_star[19] > 0.98);
}

TEST_CASE("construction errors") {
  CHECK_THROWS_AS(make_hard_instance(10, 0.01, 0.4), InputError);
  CHECK_THROWS_AS(make_hard_instance(10, 0.01, 0.3), InputError);
  CHECK_THROWS_AS(make_hard_instance(10, 0.0, 1.0), InputError);
  CHECK_THROWS_AS(make_hard_instance(0, 0.1, 1.0), InputError);
  CHECK_NOTHROW(make_hard_instance(50, 0.01, 4.0));
}

TEST_CASE("lower bound curve") {
  const HardInstance h = make_hard_instance(50, 0.01, 4.0);
  const Vector x0(50, 0.0);
  const Vector lb = lower_bound_curve(h, 1250, x0);
  REQUIRE(lb.size() == 1251);
  double dist = 0.0;
  for (double x : h.x_star) dist += x * x;
  const double additive = std::sqrt(0.01 * 4.0 / 50.0) * std::pow(1.0 - 0.5 * std::sqrt(50 * 0.01 / 4.0), 100.0);
  CHECK(lb[0] == doctest::Approx(0.005 * dist - additive).epsilon(1e-14));
  for (std::size_t k = 1; k < lb.size(); ++k) CHECK(lb[k] <= lb[k - 1]);
  CHECK(lower_bound_exponent(h) == doctest::Approx(-std::log(1.0 - 0.02)).epsilon(1e-12));
}

TEST_CASE("span audit") {
  const HardInstance h = make_hard_instance(30, 0.01, 4.0);
  const Vector zero(30, 0.0);
  for (Mode mode : {Mode::Plain, Mode::Stable, Mode::Simple}) {
    SpdQuadraticOracle o = h.oracle();
    AcdmConfig cfg;
    cfg.alpha_exponent = 0.0;
    cfg.sigma = h.sigma / h.L;
    cfg.mode = mode;
    cfg.max_iters = 60;
    cfg.seed = 3;
    const AuditedRun r = audited_run(o, cfg, zero, zero);
    CHECK(r.span_ok);
    CHECK(r.prefix >= 1);
    CHECK(r.prefix < 30);
  }
  SpdQuadraticOracle o = h.oracle();
  AcdmConfig cfg;
  cfg.alpha_exponent = 0.0;
  cfg.sigma = h.sigma / h.L;
  cfg.max_iters = 10;
  const AuditedRun warm = audited_run(o, cfg, h.x_star, zero);
  CHECK_FALSE(warm.span_ok);
  CHECK(warm.first_violation == 0);

  // Reveal logic on its own: x may only move where a nonzero partial was seen.
  SpanAudit a(zero);
  a.start(zero);
  a.reveal(0, -0.3);
  Vector x = zero;
  x[0] = 0.1;
  a.check(x);
  CHECK(a.ok());
  a.reveal(5, 0.0);
  x[5] = 1e-300;
  a.check(x);
  CHECK_FALSE(a.ok());
  CHECK(a.first_violation() == 2);
}

TEST_CASE("uniform coordinate descent stays above the lower bound") {
  const HardInstance h = make_hard_instance(50, 0.01, 4.0);
  const Vector zero(50, 0.0);
  const std::uint64_t k_max = 300;
  const Vector lb = lower_bound_curve(h, k_max, zero);
  Vector mean(k_max + 1, 0.0);
  const int seeds = 40;
  for (int s = 0; s < seeds; ++s) {
    SpdQuadraticOracle o = h.oracle();
    AcdmConfig cfg;
    cfg.alpha_exponent = 0.0;
    cfg.mode = Mode::Plain;
    cfg.max_iters = k_max;
    cfg.record_stride = 1;
    cfg.f_star = h.oracle_f_star();
    cfg.seed = static_cast<std::uint64_t>(s);
    AcdmEngine e(o, cfg);
    const AcdmResult r = e.run(zero);
    REQUIRE(r.trace.rows.size() == k_max + 1);
    for (std::size_t k = 0; k <= k_max; ++k) mean[k] += r.trace.rows[k].f_gap / seeds;
  }
  for (std::size_t k = 0; k <= k_max; ++k) CHECK(mean[k] >= lb[k]);
}

TEST_CASE("matrix market export") {
  const HardInstance h = make_hard_instance(6, 0.1, 3.0);
  const auto dir = std::filesystem::temp_directory_path() / "acdm_hard_export";
  std::filesystem::create_directories(dir);
  write_hard_instance(dir / "a.mtx", dir / "b.txt", h);
  const CsrMatrix a = read_matrix_market(dir / "a.mtx");
  const Vector b = read_vector(dir / "b.txt");
  REQUIRE(a.rows() == 6);
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 6; ++j) CHECK(a.at(i, j) == h.a.at(i, j));
  }
  CHECK(b == h.b);
  std::filesystem::remove_all(dir);
}
