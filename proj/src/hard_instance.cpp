#include "acdm/hard_instance.hpp"

#include <cmath>
#include <string>

#include "acdm/errors.hpp"
#include "acdm/matrix_market.hpp"

namespace acdm {

double HardInstance::value(std::span<const double> x) const {
  if (x.size() != n) throw InputError("hard instance: point has wrong length");
  const double c = 0.25 * (L - sigma);
  double s = (1.0 - x[0]) * (1.0 - x[0]);
  for (std::size_t i = 0; i + 1 < n; ++i) s += (x[i] - x[i + 1]) * (x[i] - x[i + 1]);
  const double tail = x[n - 1] - std::pow(q, static_cast<double>(n + 1));
  s += tail * tail;
  double sq = 0.0;
  for (double xi : x) sq += xi * xi;
  return c * s + 0.5 * sigma * sq;
}

double HardInstance::f_star() const { return value(x_star); }

double HardInstance::oracle_f_star() const {
  // At the optimum A x* = b, so 1/2 x*^T A x* - b^T x* = -1/2 b^T x*.
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += b[i] * x_star[i];
  return -0.5 * s;
}

HardInstance make_hard_instance(std::size_t n, double sigma, double s1) {
  if (n == 0) throw InputError("hard instance: n must be positive");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InputError("hard instance: sigma must be > 0");
  if (!(s1 > 4.0 * sigma * static_cast<double>(n)) || !std::isfinite(s1)) {
    throw InputError("hard instance: need S1 > 4 sigma n (S1=" + std::to_string(s1) +
                     ", 4 sigma n=" + std::to_string(4.0 * sigma * static_cast<double>(n)) + ")");
  }
  HardInstance h;
  h.n = n;
  h.sigma = sigma;
  h.s1 = s1;
  h.L = s1 / static_cast<double>(n);
  const double kappa = h.L / (h.L - sigma);
  // kappa - sqrt(kappa^2 - 1) written without cancellation.
  h.q = 1.0 / (kappa + std::sqrt((kappa - 1.0) * (kappa + 1.0)));
  const double off = -0.5 * (h.L - sigma);
  std::vector<Triplet> t;
  t.reserve(3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    t.push_back({i, i, h.L});
    if (i + 1 < n) {
      t.push_back({i, i + 1, off});
      t.push_back({i + 1, i, off});
    }
  }
  h.a = CsrMatrix::from_triplets(n, n, t);
  const double qn1 = std::pow(h.q, static_cast<double>(n + 1));  // underflows to 0 for large n
  h.b.assign(n, 0.0);
  h.b[0] += 0.5 * (h.L - sigma);
  h.b[n - 1] += 0.5 * (h.L - sigma) * qn1;
  h.constant = 0.25 * (h.L - sigma) * (1.0 + qn1 * qn1);
  h.x_star.resize(n);
  for (std::size_t k = 0; k < n; ++k) h.x_star[k] = std::pow(h.q, static_cast<double>(k + 1));
  return h;
}

double lower_bound_exponent(const HardInstance& inst) {
  return -std::log1p(-2.0 * std::sqrt(2.0 * inst.sigma / (static_cast<double>(inst.n) * inst.s1)));
}

Vector lower_bound_curve(const HardInstance& inst, std::uint64_t k_max, std::span<const double> x0) {
  if (x0.size() != inst.n) throw InputError("lower bound: x0 has wrong length");
  double dist = 0.0;
  for (std::size_t i = 0; i < inst.n; ++i) dist += (inst.x_star[i] - x0[i]) * (inst.x_star[i] - x0[i]);
  const double nd = static_cast<double>(inst.n);
  const double additive = std::sqrt(inst.sigma * inst.s1 / nd) *
                          std::pow(1.0 - 0.5 * std::sqrt(nd * inst.sigma / inst.s1), 2.0 * nd);
  const double rate = lower_bound_exponent(inst);
  Vector out(k_max + 1);
  for (std::uint64_t k = 0; k <= k_max; ++k) {
    out[k] = 0.5 * inst.sigma * std::exp(-rate * static_cast<double>(k)) * dist - additive;
  }
  return out;
}

SpanAudit::SpanAudit(std::span<const double> anchor) : anchor_(anchor.begin(), anchor.end()), revealed_(anchor.size(), false) {}

void SpanAudit::start(std::span<const double> x0) { check(x0); }

void SpanAudit::reveal(std::size_t i, double partial) {
  if (i >= revealed_.size()) throw InputError("span audit: coordinate out of range");
  if (partial != 0.0) revealed_[i] = true;
}

void SpanAudit::check(std::span<const double> x) {
  if (x.size() != anchor_.size()) throw InputError("span audit: iterate has wrong length");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!revealed_[i] && x[i] != anchor_[i]) {
      if (ok_) first_violation_ = static_cast<std::int64_t>(checks_);
      ok_ = false;
      break;
    }
  }
  ++checks_;
}

std::size_t SpanAudit::prefix() const {
  std::size_t j = 0;
  while (j < revealed_.size() && revealed_[j]) ++j;
  return j;
}

std::size_t SpanAudit::revealed_count() const {
  std::size_t c = 0;
  for (bool r : revealed_) c += r ? 1 : 0;
  return c;
}

AuditedRun audited_run(CoordinateOracle& oracle, const AcdmConfig& cfg, std::span<const double> x0,
                       std::span<const double> anchor) {
  SpanAudit audit(anchor);
  audit.start(x0);
  AcdmEngine engine(oracle, cfg);
  engine.set_step_observer([&](const StepEvent& ev) { audit.reveal(ev.coord, ev.partial); });
  engine.set_monitor(1, [&](AcdmEngine& e) {
    audit.check(e.current_x());
    audit.check(e.current_v());
    audit.check(e.current_y());
    return false;
  });
  AuditedRun out;
  out.run = engine.run(x0);
  out.span_ok = audit.ok();
  out.prefix = audit.prefix();
  out.first_violation = audit.first_violation();
  return out;
}

void write_hard_instance(const std::filesystem::path& matrix_path, const std::filesystem::path& rhs_path,
                         const HardInstance& inst) {
  write_matrix_market(matrix_path, inst.a, true);
  write_vector(rhs_path, inst.b);
}

}  // namespace acdm
