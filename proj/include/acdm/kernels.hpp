#pragma once

#include <cstddef>
#include <span>

#include "acdm/csr_matrix.hpp"

// Data-parallel inner loops. Each OpenMP kernel has a serial twin that is the
// reference in tests and the baseline in bench/. Row-parallel kernels write
// disjoint outputs, so results are bit-identical to the serial versions.
// Reductions use fixed-size blocks summed in order, which keeps them
// independent of the thread count.
namespace acdm::kernels {

inline constexpr std::size_t kParallelRowThreshold = 4096;
inline constexpr std::size_t kReductionBlock = 1024;

void spmv_serial(const CsrMatrix& m, std::span<const double> x, std::span<double> y);
void spmv_omp(const CsrMatrix& m, std::span<const double> x, std::span<double> y);

double dot_serial(std::span<const double> a, std::span<const double> b);
double dot_omp(std::span<const double> a, std::span<const double> b);

// y += alpha * x
void axpy_serial(double alpha, std::span<const double> x, std::span<double> y);
void axpy_omp(double alpha, std::span<const double> x, std::span<double> y);

// Blocked dot product with the same summation order as dot_omp; the serial
// reference for determinism checks.
double dot_blocked_serial(std::span<const double> a, std::span<const double> b);

double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);

int max_threads();

}  // namespace acdm::kernels
