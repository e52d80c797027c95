#include "acdm/experiment.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <set>
#include <sstream>

#include "acdm/baselines.hpp"
#include "acdm/engine.hpp"
#include "acdm/errors.hpp"
#include "acdm/generators.hpp"
#include "acdm/graph.hpp"
#include "acdm/hard_instance.hpp"
#include "acdm/kaczmarz.hpp"
#include "acdm/matrix_market.hpp"
#include "acdm/sdd.hpp"

namespace acdm {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw InputError("'" + key + "': expected a number, got '" + v + "'");
  return d;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos) {
    throw InputError("'" + key + "': expected a nonnegative integer, got '" + v + "'");
  }
  try {
    return std::stoull(v);
  } catch (const std::exception&) {
    throw InputError("'" + key + "': integer out of range");
  }
}

double param_double(const Params& p, const std::string& key, double def) {
  const auto it = p.find(key);
  return it == p.end() ? def : to_double(key, it->second);
}

std::uint64_t param_u64(const Params& p, const std::string& key, std::uint64_t def) {
  const auto it = p.find(key);
  return it == p.end() ? def : to_u64(key, it->second);
}

std::string param_str(const Params& p, const std::string& key, const std::string& def) {
  const auto it = p.find(key);
  return it == p.end() ? def : it->second;
}

void check_keys(const Params& p, const std::set<std::string>& allowed, const std::string& what) {
  for (const auto& [k, v] : p) {
    if (!allowed.count(k)) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      throw InputError(what + ": unknown parameter '" + k + "' (allowed: " + list + ")");
    }
  }
}

Mode parse_mode(const std::string& s) {
  if (s == "stable") return Mode::Stable;
  if (s == "simple") return Mode::Simple;
  if (s == "plain") return Mode::Plain;
  throw InputError("unknown mode '" + s + "' (stable, simple, plain)");
}

TreeStrategy parse_strategy(const std::string& s) {
  if (s == "min-resistance") return TreeStrategy::MinResistance;
  if (s == "bfs") return TreeStrategy::BfsFromRoot;
  throw InputError("unknown tree strategy '" + s + "' (min-resistance, bfs)");
}

const std::set<std::string>& known_methods() {
  static const std::set<std::string> m{"gd", "agd", "cdm", "acdm", "cg", "rk", "ark", "sdd"};
  return m;
}

}  // namespace

std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& text) {
  const std::string t = trim(text);
  const auto dots = t.find("..");
  if (dots == std::string::npos) {
    const std::uint64_t s = to_u64("seeds", t);
    return {s, s};
  }
  const std::uint64_t lo = to_u64("seeds", t.substr(0, dots));
  const std::uint64_t hi = to_u64("seeds", t.substr(dots + 2));
  if (hi < lo) throw InputError("seeds: range '" + t + "' is empty");
  return {lo, hi};
}

ExperimentSpec parse_experiment_spec(std::istream& in, const fs::path& base_dir) {
  ExperimentSpec spec;
  auto resolve = [&](const std::string& v) {
    const fs::path p(v);
    return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
  };
  std::map<std::string, Params> method_params;
  std::vector<std::string> labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InputError("spec line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw InputError("spec line " + std::to_string(lineno) + ": empty key");
    if (key == "problem") {
      spec.problem = value;
    } else if (key == "matrix") {
      spec.matrix = resolve(value);
    } else if (key == "rhs") {
      spec.rhs = resolve(value);
    } else if (key == "graph") {
      spec.graph = resolve(value);
    } else if (key == "demands") {
      spec.demands = resolve(value);
    } else if (key == "x_star") {
      spec.x_star = resolve(value);
    } else if (key == "methods") {
      std::istringstream ss(value);
      std::string tok;
      while (ss >> tok) {
        tok.erase(std::remove(tok.begin(), tok.end(), ','), tok.end());
        if (!tok.empty()) labels.push_back(tok);
      }
    } else if (key == "seeds") {
      std::tie(spec.seed_lo, spec.seed_hi) = parse_seed_range(value);
    } else if (key == "max_iters") {
      spec.max_iters = to_u64(key, value);
    } else if (key == "record_stride") {
      spec.record_stride = to_u64(key, value);
    } else if (key == "tol") {
      spec.tol = to_double(key, value);
    } else if (key == "out") {
      spec.out = resolve(value);
    } else if (key.rfind("gen.", 0) == 0) {
      spec.gen[key.substr(4)] = value;
    } else if (const auto dot = key.find('.'); dot != std::string::npos) {
      method_params[key.substr(0, dot)][key.substr(dot + 1)] = value;
    } else {
      throw InputError("spec line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  for (const auto& label : labels) {
    MethodSpec m;
    m.label = label;
    m.params = method_params[label];
    m.method = param_str(m.params, "method", label);
    m.params.erase("method");
    spec.methods.push_back(std::move(m));
  }
  for (const auto& [label, p] : method_params) {
    if (std::find(labels.begin(), labels.end(), label) == labels.end()) {
      throw InputError("spec: parameters given for '" + label + "', which is not in the method list");
    }
  }
  validate_experiment_spec(spec);
  return spec;
}

ExperimentSpec read_experiment_spec(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open spec " + path.string());
  return parse_experiment_spec(in, path.parent_path());
}

void validate_experiment_spec(const ExperimentSpec& spec) {
  if (spec.problem.empty()) throw InputError("spec: 'problem' is required");
  if (spec.methods.empty()) throw InputError("spec: the method list is empty");
  if (spec.max_iters == 0) throw InputError("spec: max_iters must be > 0");
  if (!(spec.tol > 0.0) || !std::isfinite(spec.tol)) throw InputError("spec: tol must be > 0");
  std::set<std::string> seen;
  for (const auto& m : spec.methods) {
    if (!known_methods().count(m.method)) {
      throw InputError("spec: unknown method '" + m.method + "' (gd, agd, cdm, acdm, cg, rk, ark, sdd)");
    }
    if (m.label.find_first_not_of("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789-") != std::string::npos) {
      throw InputError("spec: method label '" + m.label + "' may only use letters, digits and '-'");
    }
    if (!seen.insert(m.label).second) throw InputError("spec: duplicate method label '" + m.label + "'");
  }
}

// ---------------------------------------------------------------------------

namespace {

enum class Kind { Spd, Lsq, Graph };

struct Problem {
  Kind kind = Kind::Spd;
  CsrMatrix a;
  Vector b;
  Vector x_star;
  double f_star = 0.0;
  SpdParameters spd{};
  double sigma_dual = 0.0;
  WeightedGraph g;
  Vector chi;
  std::size_t dim = 0;
};

Eigen::MatrixXd dense(const CsrMatrix& m) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const RowView r = m.row(i);
    for (std::size_t k = 0; k < r.cols.size(); ++k) {
      d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(r.cols[k])) = r.values[k];
    }
  }
  return d;
}

void finish_spd(Problem& p) {
  if (p.b.size() != p.a.rows()) throw InputError("problem: rhs length does not match the matrix");
  p.kind = Kind::Spd;
  p.dim = p.a.rows();
  p.spd = spd_parameters(p.a);
  if (!(p.spd.sigma > 0.0)) throw InputError("problem: matrix is not positive definite");
  if (p.x_star.empty()) {
    const Eigen::LLT<Eigen::MatrixXd> llt(dense(p.a));
    if (llt.info() != Eigen::Success) throw NumericalError("problem: Cholesky factorisation failed");
    const Eigen::VectorXd x = llt.solve(Eigen::Map<const Eigen::VectorXd>(p.b.data(), static_cast<Eigen::Index>(p.b.size())));
    p.x_star.assign(x.data(), x.data() + x.size());
  }
  double bx = 0.0;
  for (std::size_t i = 0; i < p.dim; ++i) bx += p.b[i] * p.x_star[i];
  p.f_star = -0.5 * bx;
}

void finish_lsq(Problem& p) {
  if (p.b.size() != p.a.rows()) throw InputError("problem: rhs length does not match the matrix");
  p.kind = Kind::Lsq;
  p.dim = p.a.cols();
  const Eigen::MatrixXd d = dense(p.a);
  const Eigen::BDCSVD<Eigen::MatrixXd> svd(d, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  if (!(smin > 1e-12 * s(0))) throw InputError("problem: matrix does not have full column rank");
  p.sigma_dual = smin * smin;
  if (p.x_star.empty()) {
    const Eigen::VectorXd x = svd.solve(Eigen::Map<const Eigen::VectorXd>(p.b.data(), static_cast<Eigen::Index>(p.b.size())));
    p.x_star.assign(x.data(), x.data() + x.size());
  }
  if (p.x_star.size() != p.dim) throw InputError("problem: x_star length does not match the matrix");
}

Problem load_problem(const ExperimentSpec& spec) {
  Problem p;
  const Params& g = spec.gen;
  const std::uint64_t gen_seed = param_u64(g, "seed", 0);
  Rng rng(gen_seed);
  if (spec.problem == "spd") {
    check_keys(g, {"n", "spectrum", "cond", "seed"}, "spd generator");
    SpdInstance inst = random_spd_with_spectrum(param_u64(g, "n", 100), parse_spectrum(param_str(g, "spectrum", "geometric")),
                                                param_double(g, "cond", 100.0), rng);
    p.a = std::move(inst.a);
    p.b = std::move(inst.b);
    finish_spd(p);
  } else if (spec.problem == "hard") {
    check_keys(g, {"n", "sigma", "s1", "seed"}, "hard generator");
    const HardInstance h = make_hard_instance(param_u64(g, "n", 50), param_double(g, "sigma", 0.01), param_double(g, "s1", 4.0));
    p.a = h.a;
    p.b = h.b;
    p.x_star = h.x_star;
    finish_spd(p);
  } else if (spec.problem == "gaussian") {
    check_keys(g, {"m", "n", "col_cond", "seed"}, "gaussian generator");
    LinearSystem sys = random_gaussian_system(param_u64(g, "m", 200), param_u64(g, "n", 50), rng, param_double(g, "col_cond", 1.0));
    p.a = std::move(sys.a);
    p.b = std::move(sys.b);
    p.x_star = std::move(sys.x_star);
    finish_lsq(p);
  } else if (spec.problem == "graph") {
    check_keys(g, {"n", "m", "r_lo", "r_hi", "seed"}, "graph generator");
    const std::uint64_t n = param_u64(g, "n", 100);
    p.g = random_connected_graph(n, param_u64(g, "m", 3 * n), rng, param_double(g, "r_lo", 1.0), param_double(g, "r_hi", 1.0));
    p.chi = random_demands(p.g.n, rng);
    p.kind = Kind::Graph;
    p.dim = p.g.n;
  } else if (spec.problem == "file") {
    if (!g.empty()) throw InputError("spec: gen.* keys only apply to generator problems");
    if (!spec.graph.empty()) {
      p.g = read_edge_list(spec.graph);
      if (spec.demands.empty()) throw InputError("spec: a graph problem needs 'demands'");
      p.chi = read_vector(spec.demands);
      if (p.chi.size() != p.g.n) throw InputError("problem: demand vector length does not match the graph");
      p.kind = Kind::Graph;
      p.dim = p.g.n;
    } else if (!spec.matrix.empty()) {
      p.a = read_matrix_market(spec.matrix);
      if (spec.rhs.empty()) throw InputError("spec: a matrix problem needs 'rhs'");
      p.b = read_vector(spec.rhs);
      if (!spec.x_star.empty()) p.x_star = read_vector(spec.x_star);
      if (p.a.rows() == p.a.cols() && p.a.is_symmetric(1e-12)) {
        if (!p.x_star.empty() && p.x_star.size() != p.a.rows()) throw InputError("problem: x_star length does not match");
        finish_spd(p);
      } else {
        finish_lsq(p);
      }
    } else {
      throw InputError("spec: problem = file needs 'matrix' or 'graph'");
    }
  } else {
    std::string names;
    for (const auto& n : generator_names()) names += " " + n;
    throw InputError("unknown problem '" + spec.problem + "' (file or a generator:" + names + ")");
  }
  return p;
}

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::Spd:
      return "SPD";
    case Kind::Lsq:
      return "least-squares";
    case Kind::Graph:
      return "graph";
  }
  return "?";
}

void require_kind(const MethodSpec& m, const Problem& p, Kind k) {
  if (p.kind != k) {
    throw InputError("method '" + m.label + "' (" + m.method + ") needs a " + kind_name(k) + " problem, got " + kind_name(p.kind));
  }
}

void check_method(const MethodSpec& m, const Problem& p) {
  const std::string& name = m.method;
  const Params& mp = m.params;
  if (name == "gd" || name == "agd" || name == "cg") {
    require_kind(m, p, Kind::Spd);
    check_keys(mp, {}, m.label);
  } else if (name == "cdm" || name == "acdm") {
    require_kind(m, p, Kind::Spd);
    check_keys(mp, name == "cdm" ? std::set<std::string>{"alpha"} : std::set<std::string>{"alpha", "mode"}, m.label);
    const double alpha = param_double(mp, "alpha", 1.0);
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw InputError(m.label + ": alpha must lie in [0, 1]");
    parse_mode(param_str(mp, "mode", "stable"));
  } else if (name == "rk" || name == "ark") {
    require_kind(m, p, Kind::Lsq);
    check_keys(mp, name == "rk" ? std::set<std::string>{} : std::set<std::string>{"mode"}, m.label);
    parse_mode(param_str(mp, "mode", "simple"));
  } else {
    require_kind(m, p, Kind::Graph);
    check_keys(mp, {"mode", "strategy"}, m.label);
    parse_mode(param_str(mp, "mode", "stable"));
    parse_strategy(param_str(mp, "strategy", "min-resistance"));
  }
}

ConvergenceTrace run_method(const ExperimentSpec& spec, const MethodSpec& m, const Problem& p, std::uint64_t seed) {
  const std::uint64_t coord_stride = spec.record_stride != 0 ? spec.record_stride : std::max<std::size_t>(1, p.dim);
  const std::uint64_t full_stride = spec.record_stride != 0 ? spec.record_stride : 1;
  const std::string& name = m.method;
  const Params& mp = m.params;

  if (name == "gd" || name == "agd" || name == "cdm") {
    require_kind(m, p, Kind::Spd);
    check_keys(mp, name == "cdm" ? std::set<std::string>{"alpha"} : std::set<std::string>{}, m.label);
    SpdQuadraticOracle oracle(p.a, p.b);
    BaselineConfig cfg;
    cfg.L = p.spd.L;
    cfg.sigma = p.spd.sigma;
    cfg.alpha_exponent = param_double(mp, "alpha", 1.0);
    cfg.max_iters = spec.max_iters;
    cfg.seed = seed;
    cfg.record_stride = name == "cdm" ? coord_stride : full_stride;
    cfg.f_star = p.f_star;
    cfg.tol = spec.tol;
    const Vector x0(p.dim, 0.0);
    if (name == "gd") return gd_run(oracle, x0, cfg).trace;
    if (name == "agd") return agd_run(oracle, x0, cfg).trace;
    return cdm_run(oracle, x0, cfg).trace;
  }
  if (name == "acdm") {
    require_kind(m, p, Kind::Spd);
    check_keys(mp, {"alpha", "mode"}, m.label);
    SpdQuadraticOracle oracle(p.a, p.b);
    AcdmConfig cfg;
    cfg.alpha_exponent = param_double(mp, "alpha", 1.0);
    cfg.mode = parse_mode(param_str(mp, "mode", "stable"));
    const Thresholded thr = thresholded_lipschitz(oracle.lipschitz_constants(), cfg.alpha_exponent);
    cfg.sigma = weighted_sigma(p.a, WeightedNorm::from_lipschitz(thr.l_tilde, cfg.alpha_exponent).weights());
    cfg.max_iters = spec.max_iters;
    cfg.stop = StopRule::value_gap(spec.tol);
    cfg.seed = seed;
    cfg.record_stride = coord_stride;
    cfg.f_star = p.f_star;
    AcdmEngine engine(oracle, cfg);
    return engine.run(Vector(p.dim, 0.0)).trace;
  }
  if (name == "cg") {
    require_kind(m, p, Kind::Spd);
    check_keys(mp, {}, m.label);
    // gap = 1/2 r^T A^{-1} r <= |r|^2 / (2 sigma), so this residual target
    // guarantees gap <= tol * gap0.
    const double gap0 = -p.f_star;
    const double res_tol = std::sqrt(2.0 * p.spd.sigma * spec.tol * gap0);
    return cg_solve(p.a, p.b, Vector(p.dim, 0.0), res_tol, spec.max_iters, p.f_star).trace;
  }
  if (name == "rk") {
    require_kind(m, p, Kind::Lsq);
    check_keys(mp, {}, m.label);
    const RandomizedKaczmarz rk(p.a, p.b);
    BaselineConfig cfg;
    cfg.max_iters = spec.max_iters;
    cfg.seed = seed;
    cfg.record_stride = spec.record_stride != 0 ? spec.record_stride : p.a.rows();
    cfg.tol = spec.tol;
    return rk_run(rk, Vector(p.dim, 0.0), cfg, p.x_star).trace;
  }
  if (name == "ark") {
    require_kind(m, p, Kind::Lsq);
    check_keys(mp, {"mode"}, m.label);
    const ArkProblem ap(p.a, p.b, p.sigma_dual);
    ArkConfig cfg;
    cfg.mode = parse_mode(param_str(mp, "mode", "simple"));
    cfg.max_iters = spec.max_iters;
    cfg.seed = seed;
    cfg.record_stride = spec.record_stride != 0 ? spec.record_stride : p.a.rows();
    cfg.x_star = p.x_star;
    cfg.tol = spec.tol;
    return ark_run(ap, Vector(p.dim, 0.0), cfg).trace;
  }
  // sdd
  require_kind(m, p, Kind::Graph);
  check_keys(mp, {"mode", "strategy"}, m.label);
  LaplacianSolveConfig cfg;
  cfg.mode = parse_mode(param_str(mp, "mode", "stable"));
  cfg.strategy = parse_strategy(param_str(mp, "strategy", "min-resistance"));
  cfg.seed = seed;
  cfg.max_iters = spec.max_iters;
  return solve_laplacian(p.g, p.chi, spec.tol, cfg).trace;
}

fs::path run_file(const fs::path& dir, const std::string& label, std::uint64_t seed) {
  return dir / (label + "_seed" + std::to_string(seed) + ".csv");
}

}  // namespace

// ---------------------------------------------------------------------------

std::optional<std::uint64_t> iterations_to_tolerance(const ConvergenceTrace& t, double tol) {
  if (t.rows.empty()) return std::nullopt;
  const double g0 = t.rows.front().f_gap;
  for (const TraceRow& r : t.rows) {
    if (r.f_gap <= tol * g0) return r.k;
  }
  return std::nullopt;
}

std::vector<MethodSummary> summarize(const fs::path& dir, std::optional<double> tol) {
  if (!fs::is_directory(dir)) throw InputError("summarize: " + dir.string() + " is not a directory");
  if (!tol) {
    std::ifstream in(dir / "experiment.json");
    if (!in) throw InputError("summarize: no tolerance given and " + (dir / "experiment.json").string() + " is missing");
    try {
      tol = json::parse(in).at("tol").get<double>();
    } catch (const json::exception& e) {
      throw InputError(std::string("summarize: bad experiment.json: ") + e.what());
    }
  }
  std::map<std::string, std::vector<std::pair<std::uint64_t, fs::path>>> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".csv") continue;
    const std::string stem = entry.path().stem().string();
    const auto at = stem.rfind("_seed");
    if (at == std::string::npos) continue;
    const std::string num = stem.substr(at + 5);
    if (num.empty() || num.find_first_not_of("0123456789") != std::string::npos) continue;
    files[stem.substr(0, at)].push_back({std::stoull(num), entry.path()});
  }
  std::vector<MethodSummary> out;
  for (auto& [label, runs] : files) {
    std::sort(runs.begin(), runs.end());
    MethodSummary s;
    s.label = label;
    std::vector<double> iters;
    for (const auto& [seed, path] : runs) {
      const ConvergenceTrace t = ConvergenceTrace::read_csv(path);
      if (t.rows.empty()) throw InputError("summarize: " + path.string() + " has no rows");
      ++s.runs;
      if (const auto k = iterations_to_tolerance(t, *tol)) {
        ++s.reached;
        iters.push_back(static_cast<double>(*k));
      }
      s.mean_final_gap += t.rows.back().f_gap;
      s.mean_wall_ms += static_cast<double>(t.rows.back().wall_ns) * 1e-6;
    }
    s.mean_final_gap /= static_cast<double>(s.runs);
    s.mean_wall_ms /= static_cast<double>(s.runs);
    if (iters.empty()) {
      s.mean_iters_to_tol = s.median_iters_to_tol = std::numeric_limits<double>::quiet_NaN();
    } else {
      double sum = 0.0;
      for (double k : iters) sum += k;
      s.mean_iters_to_tol = sum / static_cast<double>(iters.size());
      std::sort(iters.begin(), iters.end());
      const std::size_t mid = iters.size() / 2;
      s.median_iters_to_tol = iters.size() % 2 ? iters[mid] : 0.5 * (iters[mid - 1] + iters[mid]);
    }
    out.push_back(s);
  }
  return out;
}

void write_summary_csv(std::ostream& out, const std::vector<MethodSummary>& rows) {
  out << "method,runs,reached,mean_iters_to_tol,median_iters_to_tol,mean_final_gap,mean_wall_ms\n";
  for (const auto& r : rows) {
    out << r.label << ',' << r.runs << ',' << r.reached << ',' << format_double(r.mean_iters_to_tol) << ','
        << format_double(r.median_iters_to_tol) << ',' << format_double(r.mean_final_gap) << ','
        << format_double(r.mean_wall_ms) << '\n';
  }
}

ExperimentOutcome run_experiment(const ExperimentSpec& spec, int threads) {
  validate_experiment_spec(spec);
  if (spec.out.empty()) throw InputError("spec: no output directory ('out' or --out)");
  if (threads < 1) throw InputError("threads must be >= 1");
  const Problem p = load_problem(spec);

  struct Job {
    const MethodSpec* m;
    std::uint64_t seed;
    fs::path path;
  };
  std::vector<Job> jobs;
  for (const auto& m : spec.methods) {
    for (std::uint64_t s = spec.seed_lo; s <= spec.seed_hi; ++s) jobs.push_back({&m, s, run_file(spec.out, m.label, s)});
  }
  // Fail on bad method settings before writing anything.
  for (const auto& m : spec.methods) check_method(m, p);

  fs::create_directories(spec.out);
  std::exception_ptr failure;
  const auto njobs = static_cast<std::ptrdiff_t>(jobs.size());
#pragma omp parallel for num_threads(threads) schedule(dynamic, 1)
  for (std::ptrdiff_t j = 0; j < njobs; ++j) {
    const Job& job = jobs[static_cast<std::size_t>(j)];
    try {
      const ConvergenceTrace t = run_method(spec, *job.m, p, job.seed);
      t.write_csv(job.path);
    } catch (...) {
#pragma omp critical(acdm_experiment_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  json meta;
  meta["problem"] = spec.problem;
  meta["tol"] = spec.tol;
  meta["seeds"] = {spec.seed_lo, spec.seed_hi};
  meta["max_iters"] = spec.max_iters;
  json methods = json::array();
  for (const auto& m : spec.methods) methods.push_back({{"label", m.label}, {"method", m.method}, {"params", m.params}});
  meta["methods"] = methods;
  {
    std::ofstream out(spec.out / "experiment.json");
    if (!out) throw InputError("cannot write " + (spec.out / "experiment.json").string());
    out << std::setw(2) << meta << '\n';
  }

  ExperimentOutcome outcome;
  for (const auto& j : jobs) outcome.run_files.push_back(j.path);
  outcome.summary = summarize(spec.out, spec.tol);
  const fs::path summary_path = spec.out / "summary.csv";
  const fs::path tmp = summary_path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw InputError("cannot write " + tmp.string());
    write_summary_csv(out, outcome.summary);
  }
  fs::rename(tmp, summary_path);
  return outcome;
}

// ---------------------------------------------------------------------------

std::vector<std::string> generator_names() { return {"spd", "gaussian", "graph", "hard"}; }

std::vector<fs::path> generate_problem(const std::string& name, const Params& params, std::uint64_t seed,
                                       const fs::path& out_dir) {
  const auto names = generator_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    std::string list;
    for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
    throw InputError("unknown generator '" + name + "' (available: " + list + ")");
  }
  Rng rng(seed);
  json meta;
  meta["generator"] = name;
  meta["seed"] = seed;
  std::vector<fs::path> files;
  auto emit_vector = [&](const std::string& file, std::span<const double> v) {
    write_vector(out_dir / file, v);
    files.push_back(out_dir / file);
  };
  auto emit_matrix = [&](const std::string& file, const CsrMatrix& m, bool symmetric) {
    write_matrix_market(out_dir / file, m, symmetric);
    files.push_back(out_dir / file);
  };

  // Build everything before touching the output directory.
  if (name == "spd") {
    check_keys(params, {"n", "spectrum", "cond"}, "spd generator");
    const Spectrum spectrum = parse_spectrum(param_str(params, "spectrum", "geometric"));
    const SpdInstance inst = random_spd_with_spectrum(param_u64(params, "n", 100), spectrum, param_double(params, "cond", 100.0), rng);
    const SpdParameters sp = spd_parameters(inst.a);
    fs::create_directories(out_dir);
    emit_matrix("matrix.mtx", inst.a, true);
    emit_vector("rhs.txt", inst.b);
    meta["n"] = inst.a.rows();
    meta["spectrum"] = spectrum_name(spectrum);
    meta["lambda_min"] = sp.sigma;
    meta["lambda_max"] = sp.L;
    meta["cond"] = sp.L / sp.sigma;
    meta["trace"] = sp.s1;
    meta["prescribed_eigenvalues"] = inst.eigenvalues;
  } else if (name == "gaussian") {
    check_keys(params, {"m", "n", "col_cond"}, "gaussian generator");
    const LinearSystem sys = random_gaussian_system(param_u64(params, "m", 200), param_u64(params, "n", 50), rng,
                                                    param_double(params, "col_cond", 1.0));
    const Eigen::BDCSVD<Eigen::MatrixXd> svd(dense(sys.a));
    const auto& s = svd.singularValues();
    fs::create_directories(out_dir);
    emit_matrix("matrix.mtx", sys.a, false);
    emit_vector("rhs.txt", sys.b);
    emit_vector("x_star.txt", sys.x_star);
    meta["m"] = sys.a.rows();
    meta["n"] = sys.a.cols();
    meta["sigma_max"] = s(0);
    meta["sigma_min"] = s(s.size() - 1);
    meta["kappa"] = s(0) / s(s.size() - 1);
    meta["frobenius_sq"] = sys.a.frobenius_norm_sq();
  } else if (name == "graph") {
    check_keys(params, {"n", "m", "r_lo", "r_hi"}, "graph generator");
    const std::uint64_t n = param_u64(params, "n", 100);
    const WeightedGraph g = random_connected_graph(n, param_u64(params, "m", 3 * n), rng, param_double(params, "r_lo", 1.0),
                                                   param_double(params, "r_hi", 1.0));
    const Vector chi = random_demands(g.n, rng);
    const SpanningTree t(g, TreeStrategy::MinResistance);
    fs::create_directories(out_dir);
    write_edge_list(out_dir / "graph.txt", g);
    files.push_back(out_dir / "graph.txt");
    emit_vector("demands.txt", chi);
    meta["n"] = g.n;
    meta["m"] = g.m();
    meta["off_tree_edges"] = t.off_tree().size();
    meta["total_stretch_min_resistance_tree"] = measured_total_stretch(t);
  } else {
    check_keys(params, {"n", "sigma", "s1"}, "hard generator");
    const HardInstance h = make_hard_instance(param_u64(params, "n", 50), param_double(params, "sigma", 0.01),
                                              param_double(params, "s1", 4.0));
    fs::create_directories(out_dir);
    emit_matrix("matrix.mtx", h.a, true);
    emit_vector("rhs.txt", h.b);
    emit_vector("x_star.txt", h.x_star);
    meta["n"] = h.n;
    meta["sigma"] = h.sigma;
    meta["s1"] = h.s1;
    meta["L"] = h.L;
    meta["q"] = h.q;
    meta["constant"] = h.constant;
    meta["f_star"] = h.f_star();
  }
  std::ofstream out(out_dir / "meta.json");
  if (!out) throw InputError("cannot write " + (out_dir / "meta.json").string());
  out << std::setw(2) << meta << '\n';
  files.push_back(out_dir / "meta.json");
  return files;
}

}  // namespace acdm
