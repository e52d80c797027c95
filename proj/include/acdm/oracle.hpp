#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "acdm/csr_matrix.hpp"
#include "acdm/mat2.hpp"

namespace acdm {

enum class Register { U, W };

struct OracleCounters {
  std::uint64_t partial_calls = 0;
  std::uint64_t increments = 0;
  std::uint64_t dense_updates = 0;
  std::uint64_t cache_rebuilds = 0;
  std::uint64_t basis_changes = 0;
};

// Coordinate access to a smooth convex f over R^n. The oracle owns two
// registers u, w; partials are evaluated at c1*u + c2*w and the registers
// change one coordinate at a time, so a query costs about one row of work
// instead of a full vector pass.
class CoordinateOracle {
 public:
  explicit CoordinateOracle(Vector lipschitz);
  virtual ~CoordinateOracle() = default;
  CoordinateOracle(const CoordinateOracle&) = default;
  CoordinateOracle& operator=(const CoordinateOracle&) = default;

  std::size_t dim() const { return lipschitz_.size(); }
  double lipschitz(std::size_t i) const { return lipschitz_[i]; }
  std::span<const double> lipschitz_constants() const { return lipschitz_; }

  // i-th partial of f at c1*u + c2*w.
  double partial(std::size_t i, double c1, double c2);
  // register[i] += delta, keeping caches exact.
  void increment(Register r, std::size_t i, double delta);
  // register += delta for a dense delta.
  void add_dense(Register r, std::span<const double> delta);
  void set_registers(std::span<const double> u0, std::span<const double> w0);
  // (u, w) := (m.a*u + m.b*w, m.c*u + m.d*w).
  void change_basis(const Mat2& m);
  void rebuild_caches();

  std::span<const double> u() const { return u_; }
  std::span<const double> w() const { return w_; }
  Vector combine(double c1, double c2) const;

  // Diagnostics at explicit points; cost O(nnz) or more.
  virtual double value(std::span<const double> x) const = 0;
  virtual Vector gradient(std::span<const double> x) const = 0;
  double value_at(double c1, double c2) const { return value(combine(c1, c2)); }

  // Increments between automatic cache rebuilds; 0 disables. Default 10*n.
  void set_rebuild_interval(std::uint64_t every) { rebuild_every_ = every; }
  const OracleCounters& counters() const { return counters_; }
  void reset_counters() { counters_ = {}; }

 protected:
  virtual double do_partial(std::size_t i, double c1, double c2) const = 0;
  virtual void do_increment(Register r, std::size_t i, double delta) = 0;
  virtual void do_add_dense(Register r, std::span<const double> delta);
  virtual void do_rebuild() = 0;
  virtual void do_change_basis(const Mat2& m);

  Vector& reg(Register r) { return r == Register::U ? u_ : w_; }

 private:
  Vector lipschitz_;
  Vector u_;
  Vector w_;
  OracleCounters counters_;
  std::uint64_t rebuild_every_;
  std::uint64_t since_rebuild_ = 0;
};

// f(x) = 1/2 x^T A x - b^T x with A symmetric positive definite (both
// triangles stored). L_i = A_ii.
class SpdQuadraticOracle final : public CoordinateOracle {
 public:
  SpdQuadraticOracle(CsrMatrix a, Vector b);

  const CsrMatrix& matrix() const { return a_; }
  std::span<const double> rhs() const { return b_; }

  double value(std::span<const double> x) const override;
  Vector gradient(std::span<const double> x) const override;

 protected:
  double do_partial(std::size_t i, double c1, double c2) const override;
  void do_increment(Register r, std::size_t i, double delta) override;
  void do_add_dense(Register r, std::span<const double> delta) override;
  void do_rebuild() override;

 private:
  CsrMatrix a_;
  Vector b_;
  Vector au_;
  Vector aw_;
};

// Dual of min ||x||^2 s.t. Ax = b: f(y) = 1/2 ||A^T y||^2 - <b, y>, one
// coordinate per row of A, L_i = ||a_i||^2. The primal images x_u = A^T u
// and x_w = A^T w are the working state; they are never recomputed from the
// dual registers, so the sequence of primal iterates is exactly what a
// row-action method would produce.
class DualLeastSquaresOracle final : public CoordinateOracle {
 public:
  DualLeastSquaresOracle(CsrMatrix a, Vector b);

  const CsrMatrix& matrix() const { return a_; }
  std::span<const double> rhs() const { return b_; }

  // Start from primal points directly; the dual registers are then unknown
  // and u()/w() are zero placeholders.
  void set_primal_registers(std::span<const double> xu, std::span<const double> xw);
  std::span<const double> primal_u() const { return xu_; }
  std::span<const double> primal_w() const { return xw_; }
  Vector primal_at(double c1, double c2) const;

  double value(std::span<const double> y) const override;
  Vector gradient(std::span<const double> y) const override;

 protected:
  double do_partial(std::size_t i, double c1, double c2) const override;
  void do_increment(Register r, std::size_t i, double delta) override;
  void do_rebuild() override;
  void do_change_basis(const Mat2& m) override;

 private:
  CsrMatrix a_;
  Vector b_;
  Vector xu_;
  Vector xw_;
};

// |partial_i(x) - central difference| / (1 + |partial_i(x)|). Leaves the
// oracle registers at (x, 0).
double finite_diff_check(CoordinateOracle& oracle, std::span<const double> x, std::size_t i,
                         double h);

struct SpdParameters {
  double sigma;  // lambda_min
  double L;      // lambda_max
  double s1;     // trace
};

// Dense symmetric eigensolve; meant for desk-scale n.
SpdParameters spd_parameters(const CsrMatrix& a);
// Strong convexity of x -> 1/2 x^T A x in the norm sum_i w_i x_i^2, i.e.
// lambda_min(W^{-1/2} A W^{-1/2}). Dense; desk-scale n.
double weighted_sigma(const CsrMatrix& a, std::span<const double> weights);

}  // namespace acdm
