#include "acdm/oracle.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "acdm/errors.hpp"
#include "acdm/kernels.hpp"

namespace acdm {

CoordinateOracle::CoordinateOracle(Vector lipschitz)
    : lipschitz_(std::move(lipschitz)),
      u_(lipschitz_.size(), 0.0),
      w_(lipschitz_.size(), 0.0),
      rebuild_every_(10 * lipschitz_.size()) {
  if (lipschitz_.empty()) throw InputError("oracle: dimension must be positive");
  for (double l : lipschitz_) {
    if (!(l > 0.0) || !std::isfinite(l)) throw InputError("oracle: coordinate Lipschitz constants must be finite and > 0");
  }
}

double CoordinateOracle::partial(std::size_t i, double c1, double c2) {
  ++counters_.partial_calls;
  return do_partial(i, c1, c2);
}

void CoordinateOracle::increment(Register r, std::size_t i, double delta) {
  ++counters_.increments;
  reg(r)[i] += delta;
  do_increment(r, i, delta);
  if (rebuild_every_ != 0 && ++since_rebuild_ >= rebuild_every_) rebuild_caches();
}

void CoordinateOracle::add_dense(Register r, std::span<const double> delta) {
  if (delta.size() != dim()) throw InputError("oracle: dense update has wrong length");
  ++counters_.dense_updates;
  Vector& x = reg(r);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += delta[i];
  do_add_dense(r, delta);
}

void CoordinateOracle::do_add_dense(Register r, std::span<const double> delta) {
  for (std::size_t i = 0; i < delta.size(); ++i) {
    if (delta[i] != 0.0) do_increment(r, i, delta[i]);
  }
}

void CoordinateOracle::set_registers(std::span<const double> u0, std::span<const double> w0) {
  if (u0.size() != dim() || w0.size() != dim()) throw InputError("oracle: register length mismatch");
  u_.assign(u0.begin(), u0.end());
  w_.assign(w0.begin(), w0.end());
  rebuild_caches();
}

void CoordinateOracle::change_basis(const Mat2& m) {
  ++counters_.basis_changes;
  for (std::size_t i = 0; i < u_.size(); ++i) {
    const double u = u_[i];
    const double w = w_[i];
    u_[i] = m.a * u + m.b * w;
    w_[i] = m.c * u + m.d * w;
  }
  do_change_basis(m);
  since_rebuild_ = 0;
}

void CoordinateOracle::do_change_basis(const Mat2&) {
  ++counters_.cache_rebuilds;
  do_rebuild();
}

void CoordinateOracle::rebuild_caches() {
  ++counters_.cache_rebuilds;
  since_rebuild_ = 0;
  do_rebuild();
}

Vector CoordinateOracle::combine(double c1, double c2) const {
  Vector x(u_.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = c1 * u_[i] + c2 * w_[i];
  return x;
}

// ---------------------------------------------------------------------------

namespace {

Vector spd_lipschitz(const CsrMatrix& a) {
  if (a.rows() != a.cols()) throw InputError("SPD oracle: matrix must be square");
  if (!a.is_symmetric(1e-12)) throw InputError("SPD oracle: matrix must be symmetric");
  Vector d = a.diagonal_values();
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!(d[i] > 0.0)) throw InputError("SPD oracle: diagonal entry " + std::to_string(i) + " is not positive");
  }
  return d;
}

}  // namespace

SpdQuadraticOracle::SpdQuadraticOracle(CsrMatrix a, Vector b)
    : CoordinateOracle(spd_lipschitz(a)),
      a_(std::move(a)),
      b_(std::move(b)),
      au_(a_.rows(), 0.0),
      aw_(a_.rows(), 0.0) {
  if (b_.size() != a_.rows()) throw InputError("SPD oracle: rhs length does not match matrix");
}

double SpdQuadraticOracle::do_partial(std::size_t i, double c1, double c2) const {
  return c1 * au_[i] + c2 * aw_[i] - b_[i];
}

void SpdQuadraticOracle::do_increment(Register r, std::size_t i, double delta) {
  Vector& cache = r == Register::U ? au_ : aw_;
  const RowView col = a_.row(i);  // symmetric: row i is column i
  for (std::size_t k = 0; k < col.cols.size(); ++k) cache[col.cols[k]] += delta * col.values[k];
}

void SpdQuadraticOracle::do_add_dense(Register r, std::span<const double> delta) {
  Vector& cache = r == Register::U ? au_ : aw_;
  const Vector ad = multiply(a_, delta);
  kernels::axpy(1.0, ad, cache);
}

void SpdQuadraticOracle::do_rebuild() {
  multiply(a_, u(), au_);
  multiply(a_, w(), aw_);
}

double SpdQuadraticOracle::value(std::span<const double> x) const {
  const Vector ax = multiply(a_, x);
  return 0.5 * kernels::dot(x, ax) - kernels::dot(b_, x);
}

Vector SpdQuadraticOracle::gradient(std::span<const double> x) const {
  Vector g = multiply(a_, x);
  kernels::axpy(-1.0, b_, g);
  return g;
}

// ---------------------------------------------------------------------------

namespace {

Vector row_norms_sq(const CsrMatrix& a) {
  Vector l(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    l[i] = a.row_norm_sq(i);
    if (!(l[i] > 0.0)) throw InputError("dual oracle: row " + std::to_string(i) + " of A is zero");
  }
  return l;
}

}  // namespace

DualLeastSquaresOracle::DualLeastSquaresOracle(CsrMatrix a, Vector b)
    : CoordinateOracle(row_norms_sq(a)),
      a_(std::move(a)),
      b_(std::move(b)),
      xu_(a_.cols(), 0.0),
      xw_(a_.cols(), 0.0) {
  if (b_.size() != a_.rows()) throw InputError("dual oracle: rhs length does not match rows of A");
  set_rebuild_interval(0);
}

void DualLeastSquaresOracle::set_primal_registers(std::span<const double> xu, std::span<const double> xw) {
  if (xu.size() != a_.cols() || xw.size() != a_.cols()) throw InputError("dual oracle: primal length mismatch");
  std::fill(reg(Register::U).begin(), reg(Register::U).end(), 0.0);
  std::fill(reg(Register::W).begin(), reg(Register::W).end(), 0.0);
  xu_.assign(xu.begin(), xu.end());
  xw_.assign(xw.begin(), xw.end());
}

Vector DualLeastSquaresOracle::primal_at(double c1, double c2) const {
  Vector x(xu_.size());
  for (std::size_t j = 0; j < x.size(); ++j) x[j] = c1 * xu_[j] + c2 * xw_[j];
  return x;
}

double DualLeastSquaresOracle::do_partial(std::size_t i, double c1, double c2) const {
  const RowView row = a_.row(i);
  double du = 0.0;
  double dw = 0.0;
  for (std::size_t k = 0; k < row.cols.size(); ++k) {
    du += row.values[k] * xu_[row.cols[k]];
    dw += row.values[k] * xw_[row.cols[k]];
  }
  return (c1 * du + c2 * dw) - b_[i];
}

void DualLeastSquaresOracle::do_increment(Register r, std::size_t i, double delta) {
  Vector& x = r == Register::U ? xu_ : xw_;
  const RowView row = a_.row(i);
  for (std::size_t k = 0; k < row.cols.size(); ++k) x[row.cols[k]] += delta * row.values[k];
}

void DualLeastSquaresOracle::do_rebuild() {
  xu_ = multiply_transpose(a_, u());
  xw_ = multiply_transpose(a_, w());
}

void DualLeastSquaresOracle::do_change_basis(const Mat2& m) {
  for (std::size_t j = 0; j < xu_.size(); ++j) {
    const double p = xu_[j];
    const double q = xw_[j];
    xu_[j] = m.a * p + m.b * q;
    xw_[j] = m.c * p + m.d * q;
  }
}

double DualLeastSquaresOracle::value(std::span<const double> y) const {
  const Vector x = multiply_transpose(a_, y);
  return 0.5 * kernels::dot(x, x) - kernels::dot(b_, y);
}

Vector DualLeastSquaresOracle::gradient(std::span<const double> y) const {
  const Vector x = multiply_transpose(a_, y);
  Vector g = multiply(a_, x);
  kernels::axpy(-1.0, b_, g);
  return g;
}

// ---------------------------------------------------------------------------

double finite_diff_check(CoordinateOracle& oracle, std::span<const double> x, std::size_t i, double h) {
  if (!(h > 0.0)) throw InputError("finite_diff_check: step must be > 0");
  if (x.size() != oracle.dim() || i >= oracle.dim()) throw InputError("finite_diff_check: dimension mismatch");
  const Vector zero(x.size(), 0.0);
  oracle.set_registers(x, zero);
  const double g = oracle.partial(i, 1.0, 0.0);
  Vector xp(x.begin(), x.end());
  Vector xm(x.begin(), x.end());
  xp[i] += h;
  xm[i] -= h;
  const double fd = (oracle.value(xp) - oracle.value(xm)) / (2.0 * h);
  return std::abs(g - fd) / (1.0 + std::abs(g));
}

namespace {

Eigen::MatrixXd dense_symmetric(const CsrMatrix& a, const char* who) {
  if (a.rows() != a.cols() || !a.is_symmetric(1e-12)) throw InputError(std::string(who) + ": matrix must be symmetric");
  const auto n = static_cast<Eigen::Index>(a.rows());
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const RowView r = a.row(i);
    for (std::size_t k = 0; k < r.cols.size(); ++k) {
      dense(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(r.cols[k])) = r.values[k];
    }
  }
  return dense;
}

}  // namespace

SpdParameters spd_parameters(const CsrMatrix& a) {
  const Eigen::MatrixXd dense = dense_symmetric(a, "spd_parameters");
  const auto n = dense.rows();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("spd_parameters: eigensolver failed");
  double trace = 0.0;
  for (double d : a.diagonal_values()) trace += d;
  return {es.eigenvalues()(0), es.eigenvalues()(n - 1), trace};
}

double weighted_sigma(const CsrMatrix& a, std::span<const double> weights) {
  Eigen::MatrixXd dense = dense_symmetric(a, "weighted_sigma");
  if (weights.size() != a.rows()) throw InputError("weighted_sigma: weight vector has wrong length");
  Eigen::VectorXd s(dense.rows());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double w = weights[static_cast<std::size_t>(i)];
    if (!(w > 0.0)) throw InputError("weighted_sigma: weights must be positive");
    s(i) = 1.0 / std::sqrt(w);
  }
  dense = (s.asDiagonal() * dense * s.asDiagonal()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("weighted_sigma: eigensolver failed");
  return es.eigenvalues()(0);
}

}  // namespace acdm
