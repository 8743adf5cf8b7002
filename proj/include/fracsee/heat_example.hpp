#pragma once

// The fractional heat equation on (0, pi) with Dirichlet conditions, memory
// kernels of separable exponential type, two non-instantaneous impulses and a
// state-dependent delay, assembled as a ProblemSpec.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fracsee/dynamics.hpp"
#include "fracsee/existence.hpp"

namespace fracsee {

enum class KernelWeight { One, Sine };          ///< w(v) = 1 or sin v
enum class KernelShape { Tanh, Sine, Linear };  ///< s(x)
enum class Profile { Zero, Sine, Parabola };    ///< 0, sin v, v (pi - v)

/// g(varpi, v, x) = c exp(kappa varpi) w(v) s(x), acting as
/// psi -> c w(v) int_{-inf}^0 exp(kappa varpi) s(psi(varpi)(v)) dvarpi.
struct SeparableKernel {
  double c = 0.0;
  double kappa = 1.0;
  KernelWeight w = KernelWeight::Sine;
  KernelShape s = KernelShape::Tanh;
};

struct HeatExampleConfig {
  std::size_t n_modes = 16;
  double q = 1.5;
  double a = 1.0;
  std::vector<double> r{0.25, 0.625};
  std::vector<double> s{0.375, 0.75};

  SeparableKernel g1;  ///< neutral term b
  SeparableKernel g2;  ///< jump amplitude f (times the mark)
  SeparableKernel g3;  ///< diffusion h
  std::vector<double> impulse_alpha;  ///< a_i(varpi) = alpha_i exp(kappa_i varpi)
  std::vector<double> impulse_kappa;
  std::vector<SeparableKernel> impulse_memory;  ///< kernels of m_i

  double nonlocal_eps1 = 0.0;  ///< f_1(v, z) = eps1 sin v sin z
  double nonlocal_eps2 = 0.0;
  double nonlocal_time = -1.0;  ///< time at which k_1, k_2 read the path; < 0 means a

  double delay_scale = 0.0;  ///< sigma1 = delay_scale, sigma2(x) = 1 / (1 + x)

  Profile psi_shape = Profile::Sine;  ///< prehistory, constant in time
  double psi_amp = 1.0;
  Profile xi1_shape = Profile::Zero;
  double xi1_amp = 0.0;

  double tail_rate = 2.0;  ///< y(s) = exp(tail_rate s)
  double tail_cutoff = 20.0;
  std::size_t tail_points = 4001;

  std::vector<double> q_eigenvalues{1.0};
  std::vector<Mark> marks;
  double jump_rate_scale = 1.0;
  std::uint64_t seed = 0;
  double prehistory_noise = 0.0;  ///< k(t) = prehistory_noise * e_1

  // measure-of-noncompactness constants, declared rather than derived
  double l1_star = 0.0, l2_star = 0.0, l_b_star = 0.0, mho = 0.0, chi_L2 = 0.0;
  std::vector<double> l_mi_star;
  std::vector<double> L_i;

  std::size_t n_impulses() const noexcept { return r.size(); }
  std::vector<std::string> problems() const;
  void validate() const;
  /// Copy with every kernel amplitude (c, alpha_i, eps) multiplied by factor.
  HeatExampleConfig scaled(double factor) const;
};

/// The shipped small-coefficient configuration.
HeatExampleConfig default_heat_config();

ProblemSpec build_spec(const HeatExampleConfig& cfg);

/// Growth constants from the closed-form bounds of the separable kernels;
/// the resolvent bound M is measured on the grid with step dt.
/// UnsupportedKernel when a linear shape has no finite bound (2 kappa <= tail_rate).
HypothesisConstants suggested_constants(const HeatExampleConfig& cfg, double dt = 1.0 / 256.0);

/// Grid on [0, a] with the impulse points as nodes.
TimeGrid heat_grid(const HeatExampleConfig& cfg, double dt);

}  // namespace fracsee
