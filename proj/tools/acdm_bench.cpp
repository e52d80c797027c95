#include <CLI11.hpp>
#include <exception>
#include <fstream>
#include <iostream>

#include "acdm/errors.hpp"
#include "acdm/experiment.hpp"

namespace fs = std::filesystem;

namespace {

// Generator parameters come as "--key value" or "--key=value".
acdm::Params parse_generator_flags(const std::vector<std::string>& args) {
  acdm::Params p;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) != 0 || a.size() == 2) throw acdm::InputError("unexpected argument '" + a + "'");
    const auto eq = a.find('=');
    if (eq != std::string::npos) {
      p[a.substr(2, eq - 2)] = a.substr(eq + 1);
    } else {
      if (i + 1 >= args.size()) throw acdm::InputError("missing value for '" + a + "'");
      p[a.substr(2)] = args[++i];
    }
  }
  return p;
}

void print_summary(const std::vector<acdm::MethodSummary>& rows) { acdm::write_summary_csv(std::cout, rows); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Accelerated coordinate descent experiments"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run every (method, seed) pair of an experiment spec");
  std::string spec_path, out_dir, seeds;
  int threads = 1;
  run->add_option("--spec", spec_path, "Experiment file")->required();
  run->add_option("--out", out_dir, "Output directory (overrides 'out' in the experiment file)");
  run->add_option("--seeds", seeds, "Seed range a..b (overrides 'seeds' in the experiment file)");
  run->add_option("--threads", threads, "Concurrent runs")->check(CLI::PositiveNumber);

  auto* gen = app.add_subcommand("gen", "Write a generated problem instance to disk");
  std::string gen_name, gen_out;
  std::uint64_t gen_seed = 0;
  gen->add_option("generator", gen_name, "spd, gaussian, graph or hard")->required();
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_option("--seed", gen_seed, "Generator seed");
  gen->allow_extras();
  gen->footer("Generator parameters follow as --key value, e.g. gen spd --out d --n 100 --spectrum geometric --cond 100");

  auto* sum = app.add_subcommand("summarize", "Recompute summary.csv from the run files in a directory");
  std::string sum_dir;
  double sum_tol = 0.0;
  sum->add_option("dir", sum_dir, "Experiment output directory")->required();
  auto* tol_opt = sum->add_option("--tol", sum_tol, "Relative gap tolerance (default: from experiment.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*run) {
      acdm::ExperimentSpec spec = acdm::read_experiment_spec(spec_path);
      if (!out_dir.empty()) spec.out = out_dir;
      if (!seeds.empty()) std::tie(spec.seed_lo, spec.seed_hi) = acdm::parse_seed_range(seeds);
      const acdm::ExperimentOutcome outcome = acdm::run_experiment(spec, threads);
      std::cerr << "wrote " << outcome.run_files.size() << " run files to " << spec.out.string() << '\n';
      print_summary(outcome.summary);
    } else if (*gen) {
      const auto files = acdm::generate_problem(gen_name, parse_generator_flags(gen->remaining()), gen_seed, gen_out);
      for (const auto& f : files) std::cout << f.string() << '\n';
    } else {
      std::optional<double> tol;
      if (*tol_opt) tol = sum_tol;
      const auto rows = acdm::summarize(sum_dir, tol);
      const fs::path path = fs::path(sum_dir) / "summary.csv";
      std::ofstream out(path);
      if (!out) throw acdm::InputError("cannot write " + path.string());
      acdm::write_summary_csv(out, rows);
      print_summary(rows);
    }
  } catch (const acdm::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const acdm::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
