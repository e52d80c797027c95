#pragma once

// Small random problem builders and dense helpers for tests.

#include <acdm/csr_matrix.hpp>
#include <acdm/rng.hpp>

#include <Eigen/Dense>

namespace acdm::testing {

inline Eigen::MatrixXd to_eigen(const CsrMatrix& m) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const RowView r = m.row(i);
    for (std::size_t k = 0; k < r.cols.size(); ++k) {
      d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(r.cols[k])) = r.values[k];
    }
  }
  return d;
}

inline CsrMatrix from_eigen(const Eigen::MatrixXd& d) {
  std::vector<double> rm(static_cast<std::size_t>(d.size()));
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    for (Eigen::Index j = 0; j < d.cols(); ++j) rm[static_cast<std::size_t>(i * d.cols() + j)] = d(i, j);
  }
  return CsrMatrix::from_dense(static_cast<std::size_t>(d.rows()), static_cast<std::size_t>(d.cols()), rm);
}

inline Vector to_vector(const Eigen::VectorXd& v) { return Vector(v.data(), v.data() + v.size()); }

inline Eigen::VectorXd to_eigen(const Vector& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline Vector random_vector(std::size_t n, Rng& rng) {
  Vector v(n);
  for (double& x : v) x = standard_normal(rng);
  return v;
}

// Dense SPD Q diag(lambda) Q^T with lambda uniform in [lo, hi].
inline CsrMatrix random_spd(std::size_t n, double lo, double hi, Rng& rng) {
  Eigen::MatrixXd g(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = standard_normal(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  const Eigen::MatrixXd q = qr.householderQ();
  Eigen::VectorXd lam(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < lam.size(); ++i) lam(i) = lo + (hi - lo) * uniform01(rng);
  Eigen::MatrixXd a = q * lam.asDiagonal() * q.transpose();
  a = (0.5 * (a + a.transpose())).eval();
  return from_eigen(a);
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

}  // namespace acdm::testing
