#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <vector>

namespace acdm {

struct TraceRow {
  std::uint64_t k = 0;
  double f_gap = std::numeric_limits<double>::quiet_NaN();
  double grad_sq = std::numeric_limits<double>::quiet_NaN();
  std::int64_t coord = -1;
  std::int64_t wall_ns = 0;
};

// CSV columns: k,f_gap,grad_sq,coord,wall_ns. Missing values print as nan.
struct ConvergenceTrace {
  std::vector<TraceRow> rows;

  void write_csv(std::ostream& out, bool include_wall = true) const;
  void write_csv(const std::filesystem::path& path) const;
  static ConvergenceTrace read_csv(std::istream& in);
  static ConvergenceTrace read_csv(const std::filesystem::path& path);
};

inline constexpr const char* kTraceHeader = "k,f_gap,grad_sq,coord,wall_ns";

}  // namespace acdm
