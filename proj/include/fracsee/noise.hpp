#pragma once

// Q-Wiener increments, Poisson random measure events and the stochastic
// integrals driven by them.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "fracsee/spectral.hpp"
#include "fracsee/time_grid.hpp"

namespace fracsee {

/// Counter-based 64-bit generator: output k is splitmix64(key + k*gamma) with
/// the key derived from (seed, stream, purpose). Satisfies
/// UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;
  CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t purpose = 0);
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()();
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

struct Mark {
  double value = 1.0;      ///< mark theta
  double intensity = 0.0;  ///< kappa({theta}) >= 0
};

struct NoiseConfig {
  std::vector<double> q_eigenvalues;  ///< nu_j >= 0
  std::vector<Mark> marks;            ///< finite mark space
  double jump_rate_scale = 1.0;
  std::uint64_t rng_seed = 0;
  std::uint64_t stream_id = 0;

  std::size_t n_noise() const noexcept { return q_eigenvalues.size(); }
  double trace_Q() const;
  /// kappa(gamma) = sum of mark intensities (before jump_rate_scale).
  double total_intensity() const;
  void validate() const;
};

struct PoissonEvent {
  double time = 0.0;
  std::size_t mark_index = 0;
  double mark = 0.0;
};

/// dW[j][k] ~ N(0, nu_j (t_{k+1} - t_k)).
class WienerIncrements {
 public:
  WienerIncrements() = default;
  WienerIncrements(std::size_t n_noise, std::size_t n_steps)
      : n_noise_(n_noise), n_steps_(n_steps), dw_(n_noise * n_steps, 0.0) {}
  std::size_t n_noise() const noexcept { return n_noise_; }
  std::size_t n_steps() const noexcept { return n_steps_; }
  double& operator()(std::size_t j, std::size_t k) { return dw_[j * n_steps_ + k]; }
  double operator()(std::size_t j, std::size_t k) const { return dw_[j * n_steps_ + k]; }
  std::span<const double> raw() const noexcept { return dw_; }

 private:
  std::size_t n_noise_ = 0;
  std::size_t n_steps_ = 0;
  std::vector<double> dw_;
};

/// Value of h in L_Q(K, V): column j is h e_j as a spectral field.
class NoiseOperator {
 public:
  NoiseOperator() = default;
  NoiseOperator(std::size_t n_modes, std::size_t n_noise)
      : n_modes_(n_modes), n_noise_(n_noise), a_(n_modes * n_noise, 0.0) {}
  /// Same field in every column (scalar noise on each K-mode).
  static NoiseOperator diagonal(const SpectralField& field, std::size_t n_noise);
  /// h e_n = field[n] e_n, with K spanned by the same modes as V.
  static NoiseOperator mode_diagonal(const SpectralField& field);

  std::size_t n_modes() const noexcept { return n_modes_; }
  std::size_t n_noise() const noexcept { return n_noise_; }
  double& operator()(std::size_t n, std::size_t j) { return a_[n * n_noise_ + j]; }
  double operator()(std::size_t n, std::size_t j) const { return a_[n * n_noise_ + j]; }

  /// out += sum_j (h e_j) dw_j
  void apply_add(const WienerIncrements& dw, std::size_t step, SpectralField& out) const;
  /// ||h||_Q^2 = sum_j nu_j ||h e_j||^2
  double q_norm_sq(std::span<const double> nu) const;

 private:
  std::size_t n_modes_ = 0;
  std::size_t n_noise_ = 0;
  std::vector<double> a_;
};

struct TimedOperator {
  double time = 0.0;
  NoiseOperator value;
};

WienerIncrements sample_wiener(const TimeGrid& grid, const NoiseConfig& cfg);
/// Event count ~ Poisson(a * kappa(gamma) * jump_rate_scale), uniform times,
/// marks drawn with probability proportional to their intensity. Sorted.
std::vector<PoissonEvent> sample_poisson(const TimeGrid& grid, const NoiseConfig& cfg);

/// Left-point Ito sum over the first integrand.size() steps. Sample k must be
/// taken at grid node t_k (AdaptednessError otherwise).
SpectralField ito_integral(std::span<const TimedOperator> integrand, const WienerIncrements& dw,
                           const TimeGrid& grid);

using JumpIntegrand = std::function<SpectralField(double t, double mark)>;

/// sum over events in (t0, t1] of f(t_e, theta_e) minus the compensator
/// int_{t0}^{t1} sum_theta f(t, theta) kappa(theta) scale dt (trapezoid on
/// the grid nodes of the window). t0, t1 must be grid nodes; by default the
/// whole grid.
SpectralField compensated_poisson_integral(const JumpIntegrand& f, std::span<const PoissonEvent> events,
                                           const NoiseConfig& cfg, const TimeGrid& grid, std::size_t n_modes,
                                           std::size_t first_node = 0,
                                           std::size_t last_node = TimeGrid::npos);

/// int_{-inf}^{s} h dw split as k(s) + int_0^s h dw, with the prehistory part
/// supplied as the deterministic function k. s = grid node s_index.
SpectralField history_wiener_integral(std::span<const TimedOperator> integrand,
                                      const std::function<SpectralField(double)>& k_fn,
                                      const WienerIncrements& dw, const TimeGrid& grid, std::size_t s_index,
                                      std::size_t n_modes);

}  // namespace fracsee
