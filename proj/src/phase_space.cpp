#include "fracsee/phase_space.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fracsee/errors.hpp"

namespace fracsee {

namespace {
double horizon_slack(double horizon) { return 1e-12 * std::max(1.0, std::abs(horizon)); }

void lerp(const SpectralField& a, const SpectralField& b, double w, SpectralField& out) {
  out = a;
  for (std::size_t n = 0; n < out.size(); ++n) out[n] += w * (b[n] - a[n]);
}
}  // namespace

HistoryPath::HistoryPath(Prehistory psi, std::size_t n_modes) : psi_(std::move(psi)), n_modes_(n_modes) {
  if (!psi_) throw DomainError("history path needs a prehistory");
}

void HistoryPath::append(double t, SpectralField value) {
  if (value.size() != n_modes_) throw DomainError("sample has wrong mode count");
  if (t < 0.0 || (!times_.empty() && !(t > times_.back()))) {
    throw DomainError("sample times must be >= 0 and strictly increasing");
  }
  times_.push_back(t);
  left_.push_back(std::move(value));
  right_.emplace_back(std::nullopt);
}

void HistoryPath::append_jump(double t, SpectralField left, SpectralField right) {
  append(t, std::move(left));
  set_right_limit(times_.size() - 1, std::move(right));
}

void HistoryPath::set_right_limit(std::size_t index, SpectralField right) {
  if (index >= times_.size()) throw OutOfRange("no sample with that index");
  if (right.size() != n_modes_) throw DomainError("sample has wrong mode count");
  right_[index] = std::move(right);
}

std::vector<double> HistoryPath::jump_times() const {
  std::vector<double> out;
  for (std::size_t j = 0; j < times_.size(); ++j) {
    if (right_[j]) out.push_back(times_[j]);
  }
  return out;
}

void HistoryPath::value_at(double t, SpectralField& out) const {
  if (t < 0.0 || (t == 0.0 && times_.empty())) {
    out = psi_(t);
    return;
  }
  if (times_.empty() || t > times_.back() + horizon_slack(times_.back())) {
    throw OutOfRange("lookup at t = " + std::to_string(t) + " beyond recorded horizon " +
                     std::to_string(horizon()));
  }
  if (t < times_.front()) {
    lerp(psi_(0.0), left_.front(), t / times_.front(), out);
    return;
  }
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const std::size_t j = static_cast<std::size_t>(it - times_.begin()) - 1;
  if (t == times_[j] || j + 1 == times_.size()) {
    out = left_[j];
    return;
  }
  const double w = (t - times_[j]) / (times_[j + 1] - times_[j]);
  lerp(right(j), left_[j + 1], w, out);
}

SpectralField HistoryPath::value_at(double t) const {
  SpectralField out;
  value_at(t, out);
  return out;
}

void HistoryPath::right_value_at(double t, SpectralField& out) const {
  const auto it = std::lower_bound(times_.begin(), times_.end(), t);
  if (it != times_.end() && *it == t) {
    out = right(static_cast<std::size_t>(it - times_.begin()));
    return;
  }
  value_at(t, out);
}

HistoryView::HistoryView(const HistoryPath& path, double tau) : HistoryView(path, tau, false) {}

HistoryView HistoryView::of_prehistory(const HistoryPath& path, double tau) {
  if (tau > 0.0) throw OutOfRange("prehistory view needs tau <= 0");
  return HistoryView(path, tau, true);
}

HistoryView HistoryView::right_limit(const HistoryPath& path, double tau) {
  segment(path, tau);
  return HistoryView(path, tau, false, true);
}

SpectralField HistoryView::operator()(double theta) const {
  SpectralField out;
  value(theta, out);
  return out;
}

void HistoryView::value(double theta, SpectralField& out) const {
  if (theta > 0.0) throw OutOfRange("history views are defined for theta <= 0");
  if (prehistory_only_) {
    out = path_->prehistory(tau_ + theta);
  } else if (right_at_zero_ && theta == 0.0) {
    path_->right_value_at(tau_, out);
  } else {
    path_->value_at(tau_ + theta, out);
  }
}

HistoryView segment(const HistoryPath& path, double tau) {
  if (tau < 0.0) throw OutOfRange("segment needs tau >= 0");
  if (tau > path.horizon() + horizon_slack(path.horizon())) {
    throw OutOfRange("segment at tau = " + std::to_string(tau) + " beyond recorded horizon " +
                     std::to_string(path.horizon()));
  }
  return HistoryView(path, tau);
}

PhaseNormConfig PhaseNormConfig::exponential(double rate, double tail_cutoff, std::size_t tail_points) {
  PhaseNormConfig cfg;
  cfg.tail_weight = [rate](double s) { return std::exp(rate * s); };
  cfg.tail_cutoff = tail_cutoff;
  cfg.tail_points = tail_points;
  return cfg;
}

double phase_norm(const HistoryView& view, const PhaseNormConfig& cfg) {
  if (cfg.tail_points < 2 || !cfg.tail_weight || !(cfg.tail_cutoff > 0.0)) {
    throw ConfigError("phase norm tail grid is not configured");
  }
  if (!(cfg.p >= 1.0)) throw ConfigError("phase norm exponent p must be >= 1");
  SpectralField v;
  view.value(0.0, v);
  const double head = field_norm(v);
  const std::size_t n = cfg.tail_points;
  const double h = cfg.tail_cutoff / static_cast<double>(n - 1);
  double tail = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double s = -cfg.tail_cutoff + h * static_cast<double>(k);
    const double w = cfg.tail_weight(s);
    if (w == 0.0) continue;
    view.value(std::min(s, 0.0), v);
    const double term = w * std::pow(field_norm(v), cfg.p);
    tail += (k == 0 || k + 1 == n) ? 0.5 * term : term;
  }
  return head + std::pow(h * tail, 1.0 / cfg.p);
}

double n2_of(const PhaseNormConfig& cfg, double tau) {
  if (!cfg.tail_weight) throw ConfigError("tail weight is not configured");
  if (tau <= 0.0) return 1.0;
  constexpr int panels = 2000;
  const double h = tau / panels;
  double acc = 0.0;
  for (int k = 0; k <= panels; ++k) {
    const double w = (k == 0 || k == panels) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    acc += w * cfg.tail_weight(-tau + h * k);
  }
  return 1.0 + std::sqrt(acc * h / 3.0);
}

double n3_star(const PhaseNormConfig& cfg, double a) {
  if (!cfg.tail_weight) throw ConfigError("tail weight is not configured");
  double worst = 1.0;
  constexpr int n_tau = 64, n_u = 256;
  for (int i = 0; i <= n_tau; ++i) {
    const double tau = a * i / n_tau;
    for (int k = 0; k <= n_u; ++k) {
      const double u = -cfg.tail_cutoff * k / n_u;
      const double base = cfg.tail_weight(u);
      if (base <= 0.0) continue;
      worst = std::max(worst, std::sqrt(cfg.tail_weight(u - tau) / base));
    }
  }
  return worst;
}

double j_star(const HistoryPath& path, const PhaseNormConfig& cfg, double rho_min, std::size_t samples) {
  const double base = phase_norm(HistoryView::of_prehistory(path, 0.0), cfg);
  if (base == 0.0 || rho_min >= 0.0) return 1.0;
  double worst = 1.0;
  for (std::size_t i = 0; i <= samples; ++i) {
    const double tau = rho_min * static_cast<double>(i) / static_cast<double>(samples);
    worst = std::max(worst, phase_norm(HistoryView::of_prehistory(path, tau), cfg) / base);
  }
  return worst;
}

void fill_phase_constants(PhaseNormConfig& cfg, const HistoryPath& path, double a, double rho_min) {
  cfg.N1 = 1.0;
  cfg.N2_star = n2_of(cfg, a);
  cfg.N3_star = n3_star(cfg, a);
  cfg.J_star = j_star(path, cfg, rho_min);
}

double eval_delay_norm(const DelaySpec& spec, double tau, double norm_at_zero) {
  if (!spec.sigma1) return tau;
  const double lag = spec.sigma1(tau) * (spec.sigma2 ? spec.sigma2(norm_at_zero) : 1.0);
  if (!(lag >= 0.0)) {
    throw DelayViolation("delay sigma1*sigma2 = " + std::to_string(lag) + " at tau = " + std::to_string(tau) +
                         " would look forward");
  }
  return tau - lag;
}

double eval_delay(const DelaySpec& spec, double tau, const HistoryView& view) {
  if (!spec.sigma1) return tau;
  return eval_delay_norm(spec, tau, field_norm(view(0.0)));
}

BoundCheck lemma31_bound_check(const HistoryPath& path, const PhaseNormConfig& cfg, double tau) {
  BoundCheck out;
  out.lhs = phase_norm(segment(path, tau), cfg);
  double sup = field_norm(path.value_at(tau));
  const auto times = path.times();
  for (std::size_t j = 0; j < times.size() && times[j] <= tau; ++j) {
    sup = std::max(sup, field_norm(path.left(j)));
    if (times[j] < tau) sup = std::max(sup, field_norm(path.right(j)));
  }
  const double psi_norm = phase_norm(HistoryView::of_prehistory(path, 0.0), cfg);
  out.rhs = cfg.N2_star * sup + (cfg.N3_star + cfg.J_star) * psi_norm;
  out.ok = out.lhs <= out.rhs + 1e-9;
  return out;
}

}  // namespace fracsee
