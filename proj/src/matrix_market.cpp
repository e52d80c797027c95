#include "acdm/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "acdm/errors.hpp"

namespace acdm {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

struct Banner {
  std::string format;    // coordinate | array
  std::string field;     // real | integer
  std::string symmetry;  // general | symmetric | skew-symmetric
};

Banner parse_banner(const std::string& line) {
  std::istringstream ss(line);
  std::string tag, object;
  Banner b;
  ss >> tag >> object >> b.format >> b.field >> b.symmetry;
  if (tag != "%%MatrixMarket") throw InputError("matrix market: missing %%MatrixMarket banner");
  object = lower(object);
  b.format = lower(b.format);
  b.field = lower(b.field);
  b.symmetry = lower(b.symmetry);
  if (object != "matrix") throw InputError("matrix market: only 'matrix' objects are supported");
  if (b.format != "coordinate" && b.format != "array") {
    throw InputError("matrix market: unknown format '" + b.format + "'");
  }
  if (b.field == "pattern") throw InputError("matrix market: pattern matrices are not supported (values required)");
  if (b.field == "complex") throw InputError("matrix market: complex matrices are not supported");
  if (b.field != "real" && b.field != "integer" && b.field != "double") {
    throw InputError("matrix market: unsupported field '" + b.field + "'");
  }
  if (b.symmetry != "general" && b.symmetry != "symmetric" && b.symmetry != "skew-symmetric") {
    throw InputError("matrix market: unsupported symmetry '" + b.symmetry + "'");
  }
  return b;
}

bool next_data_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '%') continue;
    return true;
  }
  return false;
}

double parse_value(std::istringstream& ss, const char* what) {
  double v;
  if (!(ss >> v)) throw InputError(std::string("matrix market: malformed ") + what);
  if (!std::isfinite(v)) throw InputError("matrix market: non-finite value");
  return v;
}

}  // namespace

CsrMatrix read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("matrix market: empty input");
  const Banner banner = parse_banner(line);
  if (!next_data_line(in, line)) throw InputError("matrix market: missing size line");
  std::istringstream size_line(line);
  long long rows = -1, cols = -1, entries = -1;
  size_line >> rows >> cols;
  if (banner.format == "coordinate") size_line >> entries;
  if (rows < 0 || cols < 0 || (banner.format == "coordinate" && entries < 0)) {
    throw InputError("matrix market: malformed size line");
  }
  const bool sym = banner.symmetry != "general";
  const double mirror = banner.symmetry == "skew-symmetric" ? -1.0 : 1.0;
  if (sym && rows != cols) throw InputError("matrix market: symmetric matrix must be square");
  const auto nr = static_cast<std::size_t>(rows);
  const auto nc = static_cast<std::size_t>(cols);

  std::vector<Triplet> trips;
  if (banner.format == "coordinate") {
    trips.reserve(static_cast<std::size_t>(entries) * (sym ? 2 : 1));
    for (long long k = 0; k < entries; ++k) {
      if (!next_data_line(in, line)) throw InputError("matrix market: fewer entries than declared");
      std::istringstream ss(line);
      long long i = 0, j = 0;
      if (!(ss >> i >> j)) throw InputError("matrix market: malformed entry line");
      const double v = parse_value(ss, "entry value");
      if (i < 1 || j < 1 || i > rows || j > cols) throw InputError("matrix market: entry index out of range");
      const auto r = static_cast<std::size_t>(i - 1);
      const auto c = static_cast<std::size_t>(j - 1);
      trips.push_back({r, c, v});
      if (sym && r != c) trips.push_back({c, r, mirror * v});
    }
  } else {
    // Column-major; symmetric arrays list only the lower triangle.
    for (std::size_t j = 0; j < nc; ++j) {
      const std::size_t start = sym ? j : 0;
      for (std::size_t i = start; i < nr; ++i) {
        if (banner.symmetry == "skew-symmetric" && i == j) continue;
        if (!next_data_line(in, line)) throw InputError("matrix market: fewer array values than declared");
        std::istringstream ss(line);
        const double v = parse_value(ss, "array value");
        if (v == 0.0) continue;
        trips.push_back({i, j, v});
        if (sym && i != j) trips.push_back({j, i, mirror * v});
      }
    }
  }
  return CsrMatrix::from_triplets(nr, nc, trips);
}

CsrMatrix read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return read_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const CsrMatrix& m, bool symmetric) {
  if (symmetric && !m.is_symmetric()) throw InputError("write_matrix_market: matrix is not symmetric");
  std::size_t count = 0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t c : m.row(i).cols) count += (!symmetric || c <= i) ? 1 : 0;
  }
  out << "%%MatrixMarket matrix coordinate real " << (symmetric ? "symmetric" : "general") << '\n';
  out << m.rows() << ' ' << m.cols() << ' ' << count << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const RowView r = m.row(i);
    for (std::size_t k = 0; k < r.cols.size(); ++k) {
      if (symmetric && r.cols[k] > i) continue;
      out << i + 1 << ' ' << r.cols[k] + 1 << ' ' << format_double(r.values[k]) << '\n';
    }
  }
}

void write_matrix_market(const std::filesystem::path& path, const CsrMatrix& m, bool symmetric) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  write_matrix_market(out, m, symmetric);
}

Vector read_vector(std::istream& in) {
  std::string first;
  std::streampos start = in.tellg();
  if (!std::getline(in, first)) return {};
  if (first.rfind("%%MatrixMarket", 0) == 0) {
    in.clear();
    in.seekg(start);
    const CsrMatrix m = read_matrix_market(in);
    if (m.cols() != 1) throw InputError("vector file must have exactly one column");
    Vector v(m.rows(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) v[i] = m.at(i, 0);
    return v;
  }
  Vector v;
  std::string line = first;
  do {
    const auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#' || line[pos] == '%') continue;
    std::istringstream ss(line);
    double x;
    if (!(ss >> x)) throw InputError("vector file: malformed line '" + line + "'");
    if (!std::isfinite(x)) throw InputError("vector file: non-finite value");
    v.push_back(x);
  } while (std::getline(in, line));
  return v;
}

Vector read_vector(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return read_vector(in);
}

void write_vector(std::ostream& out, std::span<const double> v) {
  for (double x : v) out << format_double(x) << '\n';
}

void write_vector(const std::filesystem::path& path, std::span<const double> v) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  write_vector(out, v);
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace acdm
