#include "fracsee/dynamics.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "fracsee/errors.hpp"
#include "fracsee/mlf.hpp"

namespace fracsee {

namespace {
std::string num(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}
}  // namespace

std::vector<std::string> ImpulseSchedule::problems() const {
  std::vector<std::string> out;
  if (!(a > 0.0) || !std::isfinite(a)) out.push_back("horizon a = " + num(a) + " must be finite and > 0");
  if (r.size() != s.size()) {
    out.push_back("impulse schedule has " + std::to_string(r.size()) + " start points r_i but " +
                  std::to_string(s.size()) + " end points s_i");
    return out;
  }
  if (!maps.empty() && maps.size() != r.size()) {
    out.push_back("impulse maps given for " + std::to_string(maps.size()) + " of " + std::to_string(r.size()) +
                  " impulses");
  }
  double prev = 0.0;
  std::string prev_name = "s_0 = 0";
  for (std::size_t i = 0; i < r.size(); ++i) {
    const std::string ri = "r_" + std::to_string(i + 1) + " = " + num(r[i]);
    const std::string si = "s_" + std::to_string(i + 1) + " = " + num(s[i]);
    if (!(r[i] > prev)) out.push_back(ri + " must be > " + prev_name);
    if (!(s[i] > r[i])) out.push_back(ri + " must be < " + si);
    prev = s[i];
    prev_name = si;
  }
  if (!r.empty() && !(a > prev)) out.push_back(prev_name + " must be < a = " + num(a));
  return out;
}

void ImpulseSchedule::validate() const {
  auto p = problems();
  if (!p.empty()) throw ValidationError(std::move(p));
}

std::vector<double> ImpulseSchedule::breakpoints() const {
  std::vector<double> out;
  for (std::size_t i = 0; i < r.size(); ++i) {
    out.push_back(r[i]);
    out.push_back(s[i]);
  }
  return out;
}

std::string Branch::label() const {
  switch (kind) {
    case BranchKind::Initial:
      return "initial";
    case BranchKind::Impulse:
      return "impulse:" + std::to_string(index);
    case BranchKind::PostImpulse:
      return "post:" + std::to_string(index);
  }
  return "unknown";
}

Branch classify_time(const ImpulseSchedule& schedule, double tau) {
  if (!(tau >= 0.0) || tau > schedule.a * (1.0 + 1e-12)) {
    throw OutOfRange("time " + num(tau) + " outside [0, " + num(schedule.a) + "]");
  }
  const std::size_t n = schedule.n_impulses();
  if (n == 0 || tau <= schedule.r[0]) return {BranchKind::Initial, 0};
  for (std::size_t i = 0; i < n; ++i) {
    if (tau <= schedule.s[i]) return {BranchKind::Impulse, i + 1};
    if (i + 1 == n || tau <= schedule.r[i + 1]) return {BranchKind::PostImpulse, i + 1};
  }
  return {BranchKind::PostImpulse, n};
}

void ProblemSpec::validate() const {
  std::vector<std::string> p;
  if (!(q > 1.0 && q < 2.0)) p.push_back("fractional order q = " + num(q) + " must lie in (1, 2)");
  try {
    op.validate();
  } catch (const Error& e) {
    p.push_back(e.what());
  }
  for (auto& s : schedule.problems()) p.push_back(std::move(s));
  if (!psi) p.push_back("prehistory psi is not set");
  if (xi1.size() != n_modes()) {
    p.push_back("initial velocity has " + std::to_string(xi1.size()) + " modes, operator has " +
                std::to_string(n_modes()));
  }
  try {
    noise.validate();
  } catch (const Error& e) {
    p.push_back(e.what());
  }
  if (!p.empty()) throw ValidationError(std::move(p));
}

NoiseRealization NoiseRealization::sample(const TimeGrid& grid, const NoiseConfig& cfg) {
  return {sample_wiener(grid, cfg), sample_poisson(grid, cfg)};
}

NoiseRealization NoiseRealization::sample(const TimeGrid& grid, const NoiseConfig& cfg, std::uint64_t stream_id) {
  NoiseConfig c = cfg;
  c.stream_id = stream_id;
  return sample(grid, c);
}

NoiseRealization NoiseRealization::none(const TimeGrid& grid, const NoiseConfig& cfg) {
  return {WienerIncrements(cfg.n_noise(), grid.size() - 1), {}};
}

void ResolventTable::evaluate(double q, const OperatorSpec& op, double dt, std::span<double> t_out,
                              std::span<double> s_out) {
  for (std::size_t n = 0; n < op.n_modes(); ++n) {
    t_out[n] = mlf::relaxation_T(q, op.eigenvalues[n], dt);
    s_out[n] = mlf::relaxation_S(q, op.eigenvalues[n], dt);
  }
}

ResolventTable::ResolventTable(double q, const OperatorSpec& op, const TimeGrid& grid)
    : q_(q), n_modes_(op.n_modes()), n_nodes_(grid.size()), uniform_(grid.is_uniform()) {
  std::vector<double> lags;
  if (uniform_) {
    const double dt = grid.nominal_step();
    for (std::size_t m = 0; m < n_nodes_; ++m) lags.push_back(static_cast<double>(m) * dt);
  } else {
    // distinct differences up to a relative 1e-11 of the horizon
    const double quantum = 1e-11 * std::max(1.0, grid.horizon());
    std::map<long long, std::uint32_t> seen;
    pair_slot_.assign(n_nodes_ * n_nodes_, 0);
    for (std::size_t k = 0; k < n_nodes_; ++k) {
      for (std::size_t j = 0; j <= k; ++j) {
        const double lag = grid[k] - grid[j];
        const long long key = std::llround(lag / quantum);
        auto [it, inserted] = seen.emplace(key, static_cast<std::uint32_t>(lags.size()));
        if (inserted) lags.push_back(lag);
        pair_slot_[k * n_nodes_ + j] = it->second;
      }
    }
  }
  t_.resize(lags.size() * n_modes_);
  s_.resize(lags.size() * n_modes_);
  for (std::size_t m = 0; m < lags.size(); ++m) {
    evaluate(q, op, lags[m], {t_.data() + m * n_modes_, n_modes_}, {s_.data() + m * n_modes_, n_modes_});
  }
}

HistoryView delayed_view(const HistoryPath& path, double rho) {
  if (rho <= 0.0) return HistoryView::of_prehistory(path, rho);
  return segment(path, rho);
}

}  // namespace fracsee
