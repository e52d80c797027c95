#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "acdm/trace.hpp"

namespace acdm {

using Params = std::map<std::string, std::string>;

// One entry of the method list. `label` names the output files; `method` is
// the algorithm (defaults to the label) and `params` holds the label.* keys.
struct MethodSpec {
  std::string label;
  std::string method;
  Params params;
};

// Key-value experiment description; see README for the format.
struct ExperimentSpec {
  std::string problem;  // generator name or "file"
  Params gen;           // gen.* keys
  std::filesystem::path matrix, rhs, graph, demands, x_star;
  std::vector<MethodSpec> methods;
  std::uint64_t seed_lo = 0;
  std::uint64_t seed_hi = 0;
  std::uint64_t max_iters = 10000;
  std::uint64_t record_stride = 0;  // 0: n for coordinate methods, 1 otherwise
  double tol = 1e-6;
  std::filesystem::path out;
};

// Relative paths are resolved against base_dir. Throws InputError on unknown
// keys, malformed values, an empty method list, a zero budget or tol <= 0.
ExperimentSpec parse_experiment_spec(std::istream& in, const std::filesystem::path& base_dir = {});
ExperimentSpec read_experiment_spec(const std::filesystem::path& path);
void validate_experiment_spec(const ExperimentSpec& spec);

// "a..b" or "a".
std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& text);

struct MethodSummary {
  std::string label;
  std::size_t runs = 0;
  std::size_t reached = 0;  // runs with f_gap <= tol * initial f_gap
  double mean_iters_to_tol = 0.0;
  double median_iters_to_tol = 0.0;
  double mean_final_gap = 0.0;
  double mean_wall_ms = 0.0;
};

// First k with f_gap <= tol * f_gap(row 0), if any.
std::optional<std::uint64_t> iterations_to_tolerance(const ConvergenceTrace& t, double tol);
// Recomputes the summary from the <label>_seed<k>.csv files in dir. With no
// tol, reads it from dir/experiment.json.
std::vector<MethodSummary> summarize(const std::filesystem::path& dir, std::optional<double> tol = std::nullopt);
void write_summary_csv(std::ostream& out, const std::vector<MethodSummary>& rows);

struct ExperimentOutcome {
  std::vector<std::filesystem::path> run_files;
  std::vector<MethodSummary> summary;
};

// Writes one trace CSV per (method, seed), experiment.json and summary.csv
// into spec.out. Runs execute concurrently on up to `threads` threads.
ExperimentOutcome run_experiment(const ExperimentSpec& spec, int threads = 1);

std::vector<std::string> generator_names();
// Writes the problem files plus meta.json into out_dir; returns the paths.
std::vector<std::filesystem::path> generate_problem(const std::string& name, const Params& params,
                                                    std::uint64_t seed, const std::filesystem::path& out_dir);

}  // namespace acdm
