#include "acdm/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <vector>

#include "acdm/errors.hpp"

namespace acdm::kernels {

void spmv_serial(const CsrMatrix& m, std::span<const double> x, std::span<double> y) {
  const auto rp = m.row_ptr();
  const auto ci = m.col_idx();
  const auto v = m.values();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double s = 0.0;
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) s += v[k] * x[ci[k]];
    y[i] = s;
  }
}

void spmv_omp(const CsrMatrix& m, std::span<const double> x, std::span<double> y) {
  const auto rp = m.row_ptr();
  const auto ci = m.col_idx();
  const auto v = m.values();
  const auto rows = static_cast<std::ptrdiff_t>(m.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    double s = 0.0;
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) s += v[k] * x[ci[k]];
    y[static_cast<std::size_t>(i)] = s;
  }
}

double dot_serial(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InputError("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

namespace {

double block_dot(std::span<const double> a, std::span<const double> b, std::size_t blk) {
  const std::size_t lo = blk * kReductionBlock;
  const std::size_t hi = std::min(a.size(), lo + kReductionBlock);
  double s = 0.0;
  for (std::size_t i = lo; i < hi; ++i) s += a[i] * b[i];
  return s;
}

std::size_t block_count(std::size_t n) { return (n + kReductionBlock - 1) / kReductionBlock; }

}  // namespace

double dot_blocked_serial(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InputError("dot: length mismatch");
  double s = 0.0;
  for (std::size_t blk = 0; blk < block_count(a.size()); ++blk) s += block_dot(a, b, blk);
  return s;
}

double dot_omp(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InputError("dot: length mismatch");
  const std::size_t nb = block_count(a.size());
  std::vector<double> partial(nb);
  const auto nbs = static_cast<std::ptrdiff_t>(nb);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t blk = 0; blk < nbs; ++blk) {
    partial[static_cast<std::size_t>(blk)] = block_dot(a, b, static_cast<std::size_t>(blk));
  }
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

void axpy_serial(double alpha, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw InputError("axpy: length mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void axpy_omp(double alpha, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw InputError("axpy: length mismatch");
  const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    y[static_cast<std::size_t>(i)] += alpha * x[static_cast<std::size_t>(i)];
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  return a.size() >= kParallelRowThreshold ? dot_omp(a, b) : dot_serial(a, b);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  if (x.size() >= kParallelRowThreshold) {
    axpy_omp(alpha, x, y);
  } else {
    axpy_serial(alpha, x, y);
  }
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace acdm::kernels
