#include "acdm/trace.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "acdm/errors.hpp"
#include "acdm/matrix_market.hpp"

namespace acdm {

void ConvergenceTrace::write_csv(std::ostream& out, bool include_wall) const {
  out << kTraceHeader << '\n';
  for (const TraceRow& r : rows) {
    out << r.k << ',' << format_double(r.f_gap) << ',' << format_double(r.grad_sq) << ',' << r.coord << ','
        << (include_wall ? r.wall_ns : 0) << '\n';
  }
}

void ConvergenceTrace::write_csv(const std::filesystem::path& path) const {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp);
    if (!out) throw InputError("cannot write " + tmp.string());
    write_csv(out);
  }
  std::filesystem::rename(tmp, path);
}

ConvergenceTrace ConvergenceTrace::read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) throw InputError("trace csv: bad header");
  ConvergenceTrace t;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string field[5];
    for (auto& f : field) {
      if (!std::getline(ss, f, ',')) throw InputError("trace csv: short row '" + line + "'");
    }
    TraceRow r;
    r.k = std::stoull(field[0]);
    r.f_gap = std::strtod(field[1].c_str(), nullptr);
    r.grad_sq = std::strtod(field[2].c_str(), nullptr);
    r.coord = std::stoll(field[3]);
    r.wall_ns = std::stoll(field[4]);
    t.rows.push_back(r);
  }
  return t;
}

ConvergenceTrace ConvergenceTrace::read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return read_csv(in);
}

}  // namespace acdm
