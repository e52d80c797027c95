#include "acdm/csr_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "acdm/errors.hpp"
#include "acdm/kernels.hpp"

namespace acdm {

CsrMatrix::CsrMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
                     std::vector<std::size_t> col_idx, std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
  if (row_ptr_.size() != rows_ + 1) throw InputError("csr: row_ptr must have rows+1 entries");
  if (row_ptr_.front() != 0) throw InputError("csr: row_ptr[0] must be 0");
  if (col_idx_.size() != values_.size()) throw InputError("csr: col_idx/values length mismatch");
  if (row_ptr_.back() != values_.size()) throw InputError("csr: row_ptr[rows] must equal nnz");
  for (std::size_t i = 0; i < rows_; ++i) {
    if (row_ptr_[i] > row_ptr_[i + 1]) throw InputError("csr: row_ptr must be nondecreasing");
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      if (col_idx_[k] >= cols_) {
        throw InputError("csr: column index out of range in row " + std::to_string(i));
      }
      if (k > row_ptr_[i] && col_idx_[k] <= col_idx_[k - 1]) {
        throw InputError("csr: column indices must be strictly increasing in row " +
                         std::to_string(i));
      }
      if (!std::isfinite(values_[k])) throw InputError("csr: non-finite value");
    }
  }
}

CsrMatrix CsrMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                   std::span<const Triplet> entries) {
  std::vector<Triplet> sorted(entries.begin(), entries.end());
  for (const auto& t : sorted) {
    if (t.row >= rows || t.col >= cols) throw InputError("csr: triplet index out of range");
  }
  std::sort(sorted.begin(), sorted.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<std::size_t> row_ptr(rows + 1, 0);
  std::vector<std::size_t> col_idx;
  std::vector<double> values;
  col_idx.reserve(sorted.size());
  values.reserve(sorted.size());
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    const auto& t = sorted[k];
    if (k > 0 && sorted[k - 1].row == t.row && sorted[k - 1].col == t.col) {
      values.back() += t.value;
      continue;
    }
    col_idx.push_back(t.col);
    values.push_back(t.value);
    ++row_ptr[t.row + 1];
  }
  std::partial_sum(row_ptr.begin(), row_ptr.end(), row_ptr.begin());
  return CsrMatrix(rows, cols, std::move(row_ptr), std::move(col_idx), std::move(values));
}

CsrMatrix CsrMatrix::from_dense(std::size_t rows, std::size_t cols,
                                std::span<const double> row_major, double drop_tol) {
  if (row_major.size() != rows * cols) throw InputError("csr: dense input has wrong size");
  std::vector<std::size_t> row_ptr(rows + 1, 0);
  std::vector<std::size_t> col_idx;
  std::vector<double> values;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double a = row_major[i * cols + j];
      if (std::abs(a) > drop_tol || (drop_tol == 0.0 && a != 0.0)) {
        col_idx.push_back(j);
        values.push_back(a);
      }
    }
    row_ptr[i + 1] = values.size();
  }
  return CsrMatrix(rows, cols, std::move(row_ptr), std::move(col_idx), std::move(values));
}

CsrMatrix CsrMatrix::identity(std::size_t n) {
  const Vector ones(n, 1.0);
  return diagonal(ones);
}

CsrMatrix CsrMatrix::diagonal(std::span<const double> diag) {
  const std::size_t n = diag.size();
  std::vector<std::size_t> row_ptr(n + 1);
  std::vector<std::size_t> col_idx(n);
  std::iota(row_ptr.begin(), row_ptr.end(), std::size_t{0});
  std::iota(col_idx.begin(), col_idx.end(), std::size_t{0});
  return CsrMatrix(n, n, std::move(row_ptr), std::move(col_idx),
                   std::vector<double>(diag.begin(), diag.end()));
}

RowView CsrMatrix::row(std::size_t i) const {
  const std::size_t begin = row_ptr_[i];
  const std::size_t len = row_ptr_[i + 1] - begin;
  return {std::span<const std::size_t>(col_idx_).subspan(begin, len),
          std::span<const double>(values_).subspan(begin, len)};
}

double CsrMatrix::row_dot(std::size_t i, std::span<const double> x) const {
  if (i >= rows_) throw InputError("csr_row_dot: row index out of range");
  if (x.size() != cols_) throw InputError("csr_row_dot: vector length does not match columns");
  double s = 0.0;
  for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += values_[k] * x[col_idx_[k]];
  return s;
}

double CsrMatrix::row_norm_sq(std::size_t i) const {
  double s = 0.0;
  for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += values_[k] * values_[k];
  return s;
}

double CsrMatrix::frobenius_norm_sq() const {
  double s = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) s += row_norm_sq(i);
  return s;
}

double CsrMatrix::at(std::size_t i, std::size_t j) const {
  const auto first = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
  const auto last = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0.0;
  return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

Vector CsrMatrix::diagonal_values() const {
  Vector d(std::min(rows_, cols_), 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = at(i, i);
  return d;
}

CsrMatrix CsrMatrix::transpose() const {
  std::vector<std::size_t> row_ptr(cols_ + 1, 0);
  for (std::size_t c : col_idx_) ++row_ptr[c + 1];
  std::partial_sum(row_ptr.begin(), row_ptr.end(), row_ptr.begin());
  std::vector<std::size_t> next(row_ptr.begin(), row_ptr.end() - 1);
  std::vector<std::size_t> col_idx(nnz());
  std::vector<double> values(nnz());
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      const std::size_t dst = next[col_idx_[k]]++;
      col_idx[dst] = i;
      values[dst] = values_[k];
    }
  }
  return CsrMatrix(cols_, rows_, std::move(row_ptr), std::move(col_idx), std::move(values));
}

bool CsrMatrix::is_symmetric(double tol) const {
  if (rows_ != cols_) return false;
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      const double a = values_[k];
      const double b = at(col_idx_[k], i);
      if (std::abs(a - b) > tol * std::max(std::abs(a), std::abs(b))) return false;
    }
  }
  // Entries present only in the transpose position show up as zero mismatches above.
  return true;
}

Vector CsrMatrix::to_dense() const {
  Vector d(rows_ * cols_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) d[i * cols_ + col_idx_[k]] = values_[k];
  }
  return d;
}

double csr_row_dot(const CsrMatrix& m, std::size_t i, std::span<const double> x) {
  return m.row_dot(i, x);
}

void multiply(const CsrMatrix& m, std::span<const double> x, std::span<double> y) {
  if (x.size() != m.cols() || y.size() != m.rows()) throw InputError("multiply: dimension mismatch");
  if (m.rows() >= kernels::kParallelRowThreshold) {
    kernels::spmv_omp(m, x, y);
  } else {
    kernels::spmv_serial(m, x, y);
  }
}

Vector multiply(const CsrMatrix& m, std::span<const double> x) {
  Vector y(m.rows());
  multiply(m, x, y);
  return y;
}

Vector multiply_transpose(const CsrMatrix& m, std::span<const double> x) {
  if (x.size() != m.rows()) throw InputError("multiply_transpose: dimension mismatch");
  Vector y(m.cols(), 0.0);
  const auto rp = m.row_ptr();
  const auto ci = m.col_idx();
  const auto v = m.values();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) y[ci[k]] += v[k] * xi;
  }
  return y;
}

}  // namespace acdm
