#include "acdm/generators.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "acdm/errors.hpp"

namespace acdm {

Spectrum parse_spectrum(std::string_view name) {
  if (name == "geometric") return Spectrum::Geometric;
  if (name == "linear") return Spectrum::Linear;
  if (name == "outlier") return Spectrum::Outlier;
  throw InputError("unknown spectrum '" + std::string(name) + "' (available: geometric, linear, outlier)");
}

std::string spectrum_name(Spectrum s) {
  switch (s) {
    case Spectrum::Geometric:
      return "geometric";
    case Spectrum::Linear:
      return "linear";
    case Spectrum::Outlier:
      return "outlier";
  }
  return "?";
}

namespace {

Eigen::MatrixXd gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  Eigen::MatrixXd g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = standard_normal(rng);
  }
  return g;
}

CsrMatrix to_csr(const Eigen::MatrixXd& d) {
  Vector rm(static_cast<std::size_t>(d.size()));
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    for (Eigen::Index j = 0; j < d.cols(); ++j) rm[static_cast<std::size_t>(i * d.cols() + j)] = d(i, j);
  }
  return CsrMatrix::from_dense(static_cast<std::size_t>(d.rows()), static_cast<std::size_t>(d.cols()), rm);
}

}  // namespace

SpdInstance random_spd_with_spectrum(std::size_t n, Spectrum s, double cond, Rng& rng) {
  if (n == 0) throw InputError("spd generator: n must be positive");
  if (!(cond >= 1.0) || !std::isfinite(cond)) throw InputError("spd generator: cond must be >= 1");
  Vector lam(n);
  const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = n > 1 ? static_cast<double>(i) / denom : 0.0;
    switch (s) {
      case Spectrum::Geometric:
        lam[i] = std::pow(cond, t);
        break;
      case Spectrum::Linear:
        lam[i] = 1.0 + (cond - 1.0) * t;
        break;
      case Spectrum::Outlier: {
        const std::size_t bulk = n - std::max<std::size_t>(1, n / 10);
        lam[i] = i < bulk ? 1.0 + std::min(1.0, cond - 1.0) * static_cast<double>(i) / std::max<double>(1.0, static_cast<double>(bulk) - 1.0)
                          : cond;
        break;
      }
    }
  }
  lam.back() = cond;
  lam.front() = 1.0;
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian_matrix(n, n, rng));
  const Eigen::MatrixXd q = qr.householderQ();
  const Eigen::Map<const Eigen::VectorXd> l(lam.data(), static_cast<Eigen::Index>(n));
  Eigen::MatrixXd a = q * l.asDiagonal() * q.transpose();
  a = (0.5 * (a + a.transpose())).eval();
  Vector b(n);
  for (double& x : b) x = standard_normal(rng);
  return {to_csr(a), std::move(lam), std::move(b)};
}

LinearSystem random_gaussian_system(std::size_t m, std::size_t n, Rng& rng, double col_cond) {
  if (m == 0 || n == 0) throw InputError("gaussian generator: dimensions must be positive");
  if (!(col_cond >= 1.0)) throw InputError("gaussian generator: column scale must be >= 1");
  Eigen::MatrixXd g = gaussian_matrix(m, n, rng);
  if (col_cond > 1.0 && n > 1) {
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
      g.col(j) *= std::pow(col_cond, static_cast<double>(j) / static_cast<double>(n - 1));
    }
  }
  LinearSystem sys{to_csr(g), Vector(n), {}};
  for (double& x : sys.x_star) x = standard_normal(rng);
  sys.b = multiply(sys.a, sys.x_star);
  return sys;
}

WeightedGraph random_connected_graph(std::size_t n, std::size_t m, Rng& rng, double r_lo, double r_hi) {
  if (n == 0) throw InputError("graph generator: n must be positive");
  const std::size_t max_m = n * (n - 1) / 2;
  if (m + 1 < n || m > max_m) {
    throw InputError("graph generator: need n-1 <= m <= n(n-1)/2 (n=" + std::to_string(n) + ", m=" + std::to_string(m) + ")");
  }
  if (!(r_lo > 0.0) || !(r_hi >= r_lo)) throw InputError("graph generator: need 0 < r_lo <= r_hi");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = n; i-- > 1;) std::swap(perm[i], perm[uniform_index(rng, i + 1)]);

  auto key = [n](std::size_t a, std::size_t b) { return std::min(a, b) * n + std::max(a, b); };
  std::unordered_set<std::size_t> used;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(m);
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t a = perm[i];
    const std::size_t b = perm[uniform_index(rng, i)];
    used.insert(key(a, b));
    pairs.push_back({a, b});
  }
  if (m - pairs.size() > max_m / 2) {
    // Dense: enumerate the complement and take a random prefix.
    std::vector<std::pair<std::size_t, std::size_t>> rest;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        if (!used.count(key(a, b))) rest.push_back({a, b});
      }
    }
    const std::size_t need = m - pairs.size();
    for (std::size_t i = 0; i < need; ++i) {
      std::swap(rest[i], rest[i + uniform_index(rng, rest.size() - i)]);
      pairs.push_back(rest[i]);
    }
  } else {
    while (pairs.size() < m) {
      const std::size_t a = uniform_index(rng, n);
      const std::size_t b = uniform_index(rng, n);
      if (a == b || !used.insert(key(a, b)).second) continue;
      pairs.push_back({a, b});
    }
  }
  std::vector<Edge> edges;
  edges.reserve(m);
  const double log_lo = std::log(r_lo), log_hi = std::log(r_hi);
  for (const auto& [a, b] : pairs) {
    const double r = r_hi == r_lo ? r_lo : std::exp(log_lo + (log_hi - log_lo) * uniform01(rng));
    edges.push_back({a, b, r});
  }
  // Mix tree and extra edges so edge order carries no structure.
  for (std::size_t i = edges.size(); i-- > 1;) std::swap(edges[i], edges[uniform_index(rng, i + 1)]);
  return WeightedGraph(n, std::move(edges));
}

Vector random_demands(std::size_t n, Rng& rng) {
  Vector chi(n);
  for (double& c : chi) c = standard_normal(rng);
  const double mean = std::accumulate(chi.begin(), chi.end(), 0.0) / static_cast<double>(n);
  for (double& c : chi) c -= mean;
  return chi;
}

}  // namespace acdm
