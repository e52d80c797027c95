#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "acdm/csr_matrix.hpp"
#include "acdm/graph.hpp"
#include "acdm/rng.hpp"

namespace acdm {

enum class Spectrum {
  Geometric,  // lambda_i = cond^(i/(n-1))
  Linear,     // evenly spaced in [1, cond]
  Outlier,    // 90% of eigenvalues in [1, 2], the rest at cond
};

Spectrum parse_spectrum(std::string_view name);
std::string spectrum_name(Spectrum s);

struct SpdInstance {
  CsrMatrix a;
  Vector eigenvalues;  // ascending, lambda_min = 1
  Vector b;            // standard normal
};

// Q diag(lambda) Q^T with Q Haar-distributed (QR of a Gaussian matrix).
SpdInstance random_spd_with_spectrum(std::size_t n, Spectrum s, double cond, Rng& rng);

struct LinearSystem {
  CsrMatrix a;
  Vector x_star;
  Vector b;  // A x_star
};

// m x n Gaussian matrix; column j is scaled by col_cond^(j/(n-1)) when
// col_cond > 1, which raises the condition number roughly by that factor.
// x_star is standard normal.
LinearSystem random_gaussian_system(std::size_t m, std::size_t n, Rng& rng, double col_cond = 1.0);

// Random recursive spanning tree (each vertex attaches to a uniform earlier one,
// under a random vertex order) plus m - (n - 1) distinct extra edges. Resistances are
// log-uniform in [r_lo, r_hi].
WeightedGraph random_connected_graph(std::size_t n, std::size_t m, Rng& rng, double r_lo = 1.0, double r_hi = 1.0);

// Standard normal entries with the mean removed.
Vector random_demands(std::size_t n, Rng& rng);

}  // namespace acdm
