#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace acdm {

using Vector = std::vector<double>;

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

struct RowView {
  std::span<const std::size_t> cols;
  std::span<const double> values;
};

// Compressed sparse row matrix. Column indices are strictly increasing within
// each row and all stored values are finite; the constructor enforces both.
// Symmetric matrices are stored with both triangles so that a row doubles as
// the matching column.
class CsrMatrix {
 public:
  CsrMatrix() = default;
  CsrMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
            std::vector<std::size_t> col_idx, std::vector<double> values);

  // Duplicate (row, col) entries are summed.
  static CsrMatrix from_triplets(std::size_t rows, std::size_t cols,
                                 std::span<const Triplet> entries);
  // Row-major dense input; entries with |a| <= drop_tol are skipped.
  static CsrMatrix from_dense(std::size_t rows, std::size_t cols,
                              std::span<const double> row_major, double drop_tol = 0.0);
  static CsrMatrix identity(std::size_t n);
  static CsrMatrix diagonal(std::span<const double> diag);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  std::span<const std::size_t> row_ptr() const { return row_ptr_; }
  std::span<const std::size_t> col_idx() const { return col_idx_; }
  std::span<const double> values() const { return values_; }

  RowView row(std::size_t i) const;
  std::size_t row_nnz(std::size_t i) const { return row_ptr_[i + 1] - row_ptr_[i]; }

  // Sum_j M[i,j] x[j]; touches only the nonzeros of row i.
  double row_dot(std::size_t i, std::span<const double> x) const;
  double row_norm_sq(std::size_t i) const;
  double frobenius_norm_sq() const;

  double at(std::size_t i, std::size_t j) const;
  Vector diagonal_values() const;
  CsrMatrix transpose() const;
  bool is_symmetric(double tol = 0.0) const;
  Vector to_dense() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_idx_;
  std::vector<double> values_;
};

double csr_row_dot(const CsrMatrix& m, std::size_t i, std::span<const double> x);

// y = M x. Dispatches to the OpenMP kernel for large row counts.
void multiply(const CsrMatrix& m, std::span<const double> x, std::span<double> y);
Vector multiply(const CsrMatrix& m, std::span<const double> x);
// y = M^T x.
Vector multiply_transpose(const CsrMatrix& m, std::span<const double> x);

}  // namespace acdm
