#include "fracsee/noise.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "fracsee/errors.hpp"

namespace fracsee {

namespace {
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

std::uint64_t splitmix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kWienerPurpose = 1;
constexpr std::uint64_t kPoissonPurpose = 2;
}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t purpose)
    : key_(splitmix64(seed + kGamma * splitmix64(stream + kGamma * splitmix64(purpose)))) {}

CounterRng::result_type CounterRng::operator()() { return splitmix64(key_ + kGamma * ++counter_); }

double NoiseConfig::trace_Q() const {
  double s = 0.0;
  for (double nu : q_eigenvalues) s += nu;
  return s;
}

double NoiseConfig::total_intensity() const {
  double s = 0.0;
  for (const auto& m : marks) s += m.intensity;
  return s;
}

void NoiseConfig::validate() const {
  for (double nu : q_eigenvalues) {
    if (!(nu >= 0.0) || !std::isfinite(nu)) throw DomainError("Q eigenvalues must be finite and >= 0");
  }
  for (const auto& m : marks) {
    if (!(m.intensity >= 0.0) || !std::isfinite(m.intensity) || !std::isfinite(m.value)) {
      throw DomainError("mark intensities must be finite and >= 0");
    }
  }
  if (!(jump_rate_scale >= 0.0) || !std::isfinite(jump_rate_scale)) {
    throw DomainError("jump_rate_scale must be finite and >= 0");
  }
}

NoiseOperator NoiseOperator::diagonal(const SpectralField& field, std::size_t n_noise) {
  NoiseOperator h(field.size(), n_noise);
  for (std::size_t n = 0; n < field.size(); ++n) {
    for (std::size_t j = 0; j < n_noise; ++j) h(n, j) = field[n];
  }
  return h;
}

NoiseOperator NoiseOperator::mode_diagonal(const SpectralField& field) {
  NoiseOperator h(field.size(), field.size());
  for (std::size_t n = 0; n < field.size(); ++n) h(n, n) = field[n];
  return h;
}

void NoiseOperator::apply_add(const WienerIncrements& dw, std::size_t step, SpectralField& out) const {
  if (dw.n_noise() != n_noise_ || out.size() != n_modes_) throw DomainError("noise operator shape mismatch");
  for (std::size_t j = 0; j < n_noise_; ++j) {
    const double w = dw(j, step);
    if (w == 0.0) continue;
    for (std::size_t n = 0; n < n_modes_; ++n) out[n] += (*this)(n, j) * w;
  }
}

double NoiseOperator::q_norm_sq(std::span<const double> nu) const {
  if (nu.size() != n_noise_) throw DomainError("noise operator shape mismatch");
  double acc = 0.0;
  for (std::size_t n = 0; n < n_modes_; ++n) {
    for (std::size_t j = 0; j < n_noise_; ++j) acc += nu[j] * (*this)(n, j) * (*this)(n, j);
  }
  return acc;
}

WienerIncrements sample_wiener(const TimeGrid& grid, const NoiseConfig& cfg) {
  cfg.validate();
  const std::size_t steps = grid.size() - 1;
  WienerIncrements dw(cfg.n_noise(), steps);
  for (std::size_t j = 0; j < cfg.n_noise(); ++j) {
    const double nu = cfg.q_eigenvalues[j];
    if (nu == 0.0) continue;
    // one sub-stream per noise mode so adding modes leaves earlier ones intact
    CounterRng rng(cfg.rng_seed, cfg.stream_id, kWienerPurpose + 16 * (j + 1));
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t k = 0; k < steps; ++k) dw(j, k) = std::sqrt(nu * grid.step(k)) * normal(rng);
  }
  return dw;
}

std::vector<PoissonEvent> sample_poisson(const TimeGrid& grid, const NoiseConfig& cfg) {
  cfg.validate();
  const double a = grid.horizon();
  const double rate = cfg.total_intensity() * cfg.jump_rate_scale;
  std::vector<PoissonEvent> events;
  if (rate <= 0.0) return events;
  CounterRng rng(cfg.rng_seed, cfg.stream_id, kPoissonPurpose);
  std::poisson_distribution<long> count_dist(a * rate);
  const long count = count_dist(rng);
  std::uniform_real_distribution<double> when(0.0, a);
  std::vector<double> weights;
  for (const auto& m : cfg.marks) weights.push_back(m.intensity);
  std::discrete_distribution<std::size_t> which(weights.begin(), weights.end());
  events.reserve(static_cast<std::size_t>(count));
  for (long e = 0; e < count; ++e) {
    PoissonEvent ev;
    ev.time = when(rng);
    ev.mark_index = which(rng);
    ev.mark = cfg.marks[ev.mark_index].value;
    events.push_back(ev);
  }
  std::sort(events.begin(), events.end(), [](const PoissonEvent& x, const PoissonEvent& y) {
    return x.time < y.time;
  });
  return events;
}

SpectralField ito_integral(std::span<const TimedOperator> integrand, const WienerIncrements& dw,
                           const TimeGrid& grid) {
  if (integrand.size() > dw.n_steps()) throw DomainError("integrand longer than the increment record");
  const std::size_t n_modes = integrand.empty() ? 0 : integrand.front().value.n_modes();
  SpectralField out(n_modes);
  for (std::size_t k = 0; k < integrand.size(); ++k) {
    const double t = integrand[k].time;
    if (std::abs(t - grid[k]) > 1e-12 * std::max(1.0, grid.horizon())) {
      throw AdaptednessError("integrand for increment " + std::to_string(k) + " sampled at t = " +
                             std::to_string(t) + " instead of its left endpoint " + std::to_string(grid[k]));
    }
    integrand[k].value.apply_add(dw, k, out);
  }
  return out;
}

SpectralField compensated_poisson_integral(const JumpIntegrand& f, std::span<const PoissonEvent> events,
                                           const NoiseConfig& cfg, const TimeGrid& grid, std::size_t n_modes,
                                           std::size_t first_node, std::size_t last_node) {
  if (last_node == TimeGrid::npos) last_node = grid.size() - 1;
  if (first_node > last_node || last_node >= grid.size()) throw OutOfRange("invalid integration window");
  const double t0 = grid[first_node], t1 = grid[last_node];
  SpectralField out(n_modes);
  for (const auto& ev : events) {
    if (ev.time > t0 && ev.time <= t1) out += f(ev.time, ev.mark);
  }
  const double scale = cfg.jump_rate_scale;
  if (scale == 0.0 || first_node == last_node) return out;
  auto rate_density = [&](double t) {
    SpectralField acc(n_modes);
    for (const auto& m : cfg.marks) {
      if (m.intensity != 0.0) acc.axpy(m.intensity * scale, f(t, m.value));
    }
    return acc;
  };
  SpectralField prev = rate_density(t0);
  for (std::size_t k = first_node; k < last_node; ++k) {
    SpectralField next = rate_density(grid[k + 1]);
    const double h = grid.step(k);
    out.axpy(-0.5 * h, prev);
    out.axpy(-0.5 * h, next);
    prev = std::move(next);
  }
  return out;
}

SpectralField history_wiener_integral(std::span<const TimedOperator> integrand,
                                      const std::function<SpectralField(double)>& k_fn,
                                      const WienerIncrements& dw, const TimeGrid& grid, std::size_t s_index,
                                      std::size_t n_modes) {
  if (s_index >= grid.size()) throw OutOfRange("history integral end beyond the grid");
  if (integrand.size() < s_index) throw DomainError("integrand does not cover [0, s]");
  SpectralField out = k_fn ? k_fn(grid[s_index]) : SpectralField(n_modes);
  if (out.size() != n_modes) throw DomainError("prehistory noise term has wrong mode count");
  if (s_index > 0) out += ito_integral(integrand.first(s_index), dw, grid);
  return out;
}

}  // namespace fracsee
