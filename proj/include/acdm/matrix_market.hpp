#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "acdm/csr_matrix.hpp"

namespace acdm {

// Real coordinate (general, symmetric, skew-symmetric) and real array
// formats. Symmetric input is expanded to both triangles.
CsrMatrix read_matrix_market(std::istream& in);
CsrMatrix read_matrix_market(const std::filesystem::path& path);

// symmetric=true writes the lower triangle under a "symmetric" banner;
// the matrix must actually be symmetric.
void write_matrix_market(std::ostream& out, const CsrMatrix& m, bool symmetric = false);
void write_matrix_market(const std::filesystem::path& path, const CsrMatrix& m,
                         bool symmetric = false);

// A vector stored either as a one-column Matrix Market array/coordinate file
// or as plain text with one value per line ('#' comments allowed).
Vector read_vector(std::istream& in);
Vector read_vector(const std::filesystem::path& path);
void write_vector(std::ostream& out, std::span<const double> v);
void write_vector(const std::filesystem::path& path, std::span<const double> v);

// "%.17g"
std::string format_double(double x);

}  // namespace acdm
