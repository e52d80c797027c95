#include <doctest.h>

#include <acdm/coefficients.hpp>
#include <acdm/engine.hpp>
#include <acdm/errors.hpp>

#include <cmath>

#include "../support/instances.hpp"
#include "../support/naive_acdm.hpp"

using namespace acdm;

namespace {

// Root of g^2 - g/(2n) - (1 - g sigma/S) * prev^2 in [1/(2n), cap] by bisection.
double gamma_by_bisection(double prev, double n, double sigma, double s) {
  auto f = [&](double g) { return g * g - g / (2 * n) - (1 - g * sigma / s) * prev * prev; };
  double lo = 1.0 / (2 * n), hi = std::sqrt(s / (2 * n * sigma)) + 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0 ? hi : lo) = mid;
  }
  return std::min(0.5 * (lo + hi), std::sqrt(s / (2 * n * sigma)));
}

}  // namespace

TEST_CASE("thresholded_lipschitz examples") {
  const auto t1 = thresholded_lipschitz(Vector{1, 1, 1, 1}, 1.0);
  CHECK(t1.l_tilde == Vector{1, 1, 1, 1});
  CHECK(t1.s_tilde == 4.0);

  const auto t2 = thresholded_lipschitz(Vector{10, 0.1}, 1.0);
  CHECK(t2.l_tilde[0] == 10.0);
  CHECK(t2.l_tilde[1] == doctest::Approx(5.05));
  CHECK(t2.s_tilde == doctest::Approx(15.05));

  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    Vector l(1 + uniform_index(rng, 20));
    double s = 0.0;
    for (double& x : l) s += (x = std::exp(4.0 * standard_normal(rng)));
    for (double alpha : {0.0, 0.5, 1.0}) {
      const auto t = thresholded_lipschitz(l, alpha);
      double sa = 0.0;
      for (double x : l) sa += alpha == 0.0 ? 1.0 : std::pow(x, alpha);
      for (std::size_t i = 0; i < l.size(); ++i) {
        CHECK(t.l_tilde[i] >= l[i]);
        CHECK(t.sample_weights[i] >= sa / l.size() * (1 - 1e-12));
      }
      CHECK(t.s_tilde <= 2.0 * sa * (1 + 1e-12));
    }
    CHECK(thresholded_lipschitz(l, 1.0).s_tilde <= 2.0 * s * (1 + 1e-12));
  }
  const auto t0 = thresholded_lipschitz(Vector{5, 0.2, 1}, 0.0);
  CHECK(t0.s_tilde == 3.0);
  CHECK(t0.sample_weights == Vector{1, 1, 1});
  CHECK_THROWS_AS(thresholded_lipschitz(Vector{1, 0}, 1.0), InputError);
  CHECK_THROWS_AS(thresholded_lipschitz(Vector{1, 1}, 1.5), InputError);
}

TEST_CASE("next_coefficients examples") {
  const auto s0 = initial_coefficients(1, 1.0, 2.0, Mode::Stable);
  CHECK(s0.gamma == doctest::Approx(0.577058).epsilon(1e-6));
  CHECK(s0.beta == doctest::Approx(0.711471).epsilon(1e-6));
  // 0.821950 is a rounded value that is off in the sixth digit; 0.8219520332
  // solves the same quadratic in extended precision.
  CHECK(std::abs(s0.alpha - 0.821950) < 3e-6);
  CHECK(std::abs(s0.alpha - 0.821952033243551) < 1e-12);
  CHECK(std::abs(s0.gamma - 0.577058003116583) < 1e-12);
  CHECK(std::abs(s0.gamma - gamma_by_bisection(0.25, 1, 1, 2)) < 1e-12);

  auto s = s0;
  for (int k = 0; k < 2000; ++k) s = next_coefficients(s);
  CHECK(s.gamma == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.beta == doctest::Approx(0.5).epsilon(1e-12));

  CHECK(gamma_update(1.0, 1, 1.0, 2.0) == 1.0);
  CHECK(gamma_update(1.5, 1, 1.0, 2.0) == 1.0);
  CHECK_THROWS_AS(initial_coefficients(1, 5.0, 2.0, Mode::Stable), InputError);
}

TEST_CASE("coefficient schedule follows the implicit quadratic") {
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const double n = static_cast<double>(1 + uniform_index(rng, 200));
    const double s = std::exp(3 * standard_normal(rng));
    const double sigma = 2 * n * s * std::exp(-8 * uniform01(rng));
    auto c = initial_coefficients(static_cast<std::size_t>(n), sigma, s, Mode::Stable);
    double prev = 1.0 / (4 * n);
    for (int k = 0; k < 30; ++k) {
      CHECK(testing::rel_diff(c.gamma, gamma_by_bisection(prev, n, sigma, s)) < 1e-10);
      prev = c.gamma;
      c = next_coefficients(c);
    }
  }
}

TEST_CASE("simple mode is the fixed point of the stable schedule") {
  const auto s = initial_coefficients(10, 0.3, 7.0, Mode::Simple);
  CHECK(s.theta == doctest::Approx(std::sqrt(0.3 / (2 * 7.0 * 10))));
  CHECK(s.gamma == doctest::Approx(s.gamma_cap()));
  CHECK(s.alpha == doctest::Approx(s.beta / (s.beta + 2 * 10 * s.gamma - 1)));
  CHECK(next_coefficients(s).gamma == s.gamma);
  const auto one = initial_coefficients(1, 2.0, 1.0, Mode::Simple);
  CHECK(one.theta <= 1.0);
}

TEST_CASE("det of the step matrix") {
  auto c = initial_coefficients(5, 0.1, 3.0, Mode::Stable);
  for (int k = 0; k < 20; ++k) {
    const auto nx = next_coefficients(c);
    const Mat2 a{c.beta, 1 - c.beta, nx.alpha * c.beta, 1 - nx.alpha * c.beta};
    CHECK(a.det() == doctest::Approx(c.beta * (1 - nx.alpha)).epsilon(1e-12));
    c = nx;
  }
}

TEST_CASE("one-dimensional quadratic is solved in one step") {
  SpdQuadraticOracle o(CsrMatrix::identity(1), Vector{0.0});
  for (Mode mode : {Mode::Stable, Mode::Simple, Mode::Plain}) {
    AcdmConfig cfg;
    cfg.sigma = 1.0;
    cfg.mode = mode;
    AcdmEngine e(o, cfg);
    e.reset(Vector{3.0});
    e.step();
    CHECK(std::abs(e.current_x()[0]) < 1e-15);
  }
}

TEST_CASE("materialize") {
  const Vector v0{1, 2}, y0{3, 4};
  const auto [v, y] = materialize({Mat2::identity(), v0, y0});
  CHECK(v == v0);
  CHECK(y == y0);
  const auto [v2, y2] = materialize({Mat2{0, 1, 1, 0}, v0, y0});
  CHECK(v2 == y0);
  CHECK(y2 == v0);

  Rng rng(2);
  const CsrMatrix a = testing::random_spd(6, 1, 2, rng);
  SpdQuadraticOracle o(a, testing::random_vector(6, rng));
  AcdmConfig cfg;
  cfg.sigma = 1.0;
  AcdmEngine e(o, cfg);
  const Vector x0 = testing::random_vector(6, rng);
  e.reset(x0);
  const auto [vz, yz] = materialize({e.basis(), o.u(), o.w()});
  CHECK(vz == x0);
  CHECK(yz == x0);
}

TEST_CASE("implicit engine matches the naive reference") {
  Rng rng(77);
  for (Mode mode : {Mode::Stable, Mode::Simple}) {
    for (int trial = 0; trial < 4; ++trial) {
      const std::size_t n = 50;
      const CsrMatrix a = testing::random_spd(n, 0.05, 5.0, rng);
      const Vector b = testing::random_vector(n, rng);
      const Vector x0 = testing::random_vector(n, rng);
      const double sigma = 0.05 / 5.0 * 0.9;  // lower bound on sigma_0 / max L~
      SpdQuadraticOracle o(a, b);
      AcdmConfig cfg;
      cfg.sigma = sigma;
      cfg.mode = mode;
      cfg.seed = 1000 + static_cast<std::uint64_t>(trial);
      AcdmEngine e(o, cfg);
      e.reset(x0);
      testing::NaiveAcdm ref(a, b, 1.0, sigma, mode, cfg.seed, x0);
      double worst = 0.0;
      for (int k = 0; k < 1000; ++k) {
        const std::size_t i = e.step();
        ref.step();
        REQUIRE(i == ref.coords.back());
      }
      const Vector v = e.current_v(), y = e.current_y(), x = e.current_x();
      for (std::size_t j = 0; j < n; ++j) {
        worst = std::max({worst, testing::rel_diff(v[j], ref.v[j]), testing::rel_diff(y[j], ref.y[j]),
                          testing::rel_diff(x[j], ref.x[j])});
      }
      CHECK(worst < 1e-8);
    }
  }
}

TEST_CASE("run returns x0 at the optimum with zero gap") {
  SpdQuadraticOracle o(CsrMatrix::diagonal(Vector{1, 2}), Vector{1, 2});
  AcdmConfig cfg;
  cfg.sigma = 0.5;
  cfg.max_iters = 5;
  cfg.record_stride = 1;
  cfg.f_star = -1.5;
  AcdmEngine e(o, cfg);
  const auto r = e.run(Vector{1, 1});
  CHECK(r.x == Vector{1, 1});
  CHECK(r.final_gap == 0.0);
  CHECK(r.trace.rows.size() == 6);
  for (std::size_t k = 0; k < r.trace.rows.size(); ++k) CHECK(r.trace.rows[k].k == k);
}

TEST_CASE("value-gap stop and gradient-window stop") {
  Rng rng(5);
  const CsrMatrix a = testing::random_spd(20, 0.5, 2.0, rng);
  const Vector b = testing::random_vector(20, rng);
  const Vector xs = testing::to_vector(testing::to_eigen(a).ldlt().solve(testing::to_eigen(b)));
  SpdQuadraticOracle o(a, b);
  const double fstar = o.value(xs);
  AcdmConfig cfg;
  cfg.sigma = 0.2;
  cfg.max_iters = 100000;
  cfg.f_star = fstar;
  cfg.stop = StopRule::value_gap(1e-6);
  AcdmEngine e(o, cfg);
  const auto r = e.run(Vector(20, 0.0));
  CHECK(r.iterations < 100000);
  CHECK(r.final_gap <= 1e-6 * r.trace.rows.front().f_gap);

  cfg.stop = StopRule::gradient_window(40);
  AcdmEngine g(o, cfg);
  const auto rg = g.run(Vector(20, 0.0));
  REQUIRE(rg.stop_iteration.has_value());
  CHECK(*rg.stop_iteration >= 40);
  CHECK(*rg.stop_iteration <= 79);
  CHECK(rg.iterations == *rg.stop_iteration);
  CHECK(std::isfinite(rg.window_grad_sq));
  const Vector y = g.current_y();
  CHECK(rg.x == y);
}

TEST_CASE("non-finite partials abort") {
  SpdQuadraticOracle o(CsrMatrix::identity(2), Vector{0, 0});
  AcdmConfig cfg;
  cfg.sigma = 1.0;
  AcdmEngine e(o, cfg);
  e.reset(Vector{std::numeric_limits<double>::infinity(), 0.0});
  bool threw = false;
  for (int k = 0; k < 10 && !threw; ++k) {
    try {
      e.step();
    } catch (const NumericalError&) {
      threw = true;
    }
  }
  CHECK(threw);
}

TEST_CASE("renormalisation keeps the iterates") {
  Rng rng(9);
  const CsrMatrix a = testing::random_spd(10, 0.01, 1.0, rng);
  const Vector b = testing::random_vector(10, rng);
  const Vector x0(10, 0.0);
  for (double floor_det : {1e-7, 0.5}) {
    SpdQuadraticOracle o(a, b);
    AcdmConfig cfg;
    cfg.sigma = 0.009;
    cfg.det_floor = floor_det;
    cfg.seed = 4;
    AcdmEngine e(o, cfg);
    e.reset(x0);
    testing::NaiveAcdm ref(a, b, 1.0, cfg.sigma, Mode::Stable, cfg.seed, x0);
    for (int k = 0; k < 400; ++k) {
      e.step();
      ref.step();
      CHECK(std::abs(e.basis().det()) >= floor_det * 1e-3);
    }
    if (floor_det == 0.5) CHECK(e.renormalizations() > 0);
    const Vector y = e.current_y();
    for (std::size_t j = 0; j < 10; ++j) CHECK(testing::rel_diff(y[j], ref.y[j]) < 1e-8);
  }
}
