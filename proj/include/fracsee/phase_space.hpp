#pragma once

// Phase space PC_0 x L^p(y, V) of history segments, the recorded solution
// path, and the state-dependent delay.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "fracsee/spectral.hpp"

namespace fracsee {

/// psi(t) for t <= 0.
using Prehistory = std::function<SpectralField(double)>;

/// Path on (-inf, horizon]: the prehistory for t < 0 and piecewise-linear
/// samples on [0, horizon]. At a jump time both one-sided values are kept;
/// point lookups return the left limit there (xi_{r_i} = xi_{r_i^-}) and
/// interpolation to the right starts from the right limit.
///
/// Single writer: the solver appends; readers take views afterwards.
class HistoryPath {
 public:
  HistoryPath(Prehistory psi, std::size_t n_modes);

  std::size_t n_modes() const noexcept { return n_modes_; }
  bool empty() const noexcept { return times_.empty(); }
  /// Last sample time; 0 when no samples are stored.
  double horizon() const noexcept { return times_.empty() ? 0.0 : times_.back(); }

  void append(double t, SpectralField value);
  /// Sample with distinct left and right limits.
  void append_jump(double t, SpectralField left, SpectralField right);
  /// Overwrite the right limit of an existing sample (marks it as a jump).
  void set_right_limit(std::size_t index, SpectralField right);

  std::size_t size() const noexcept { return times_.size(); }
  std::span<const double> times() const noexcept { return times_; }
  const SpectralField& left(std::size_t j) const { return left_[j]; }
  const SpectralField& right(std::size_t j) const { return right_[j] ? *right_[j] : left_[j]; }
  bool is_jump(std::size_t j) const { return right_[j].has_value(); }
  std::vector<double> jump_times() const;

  /// Value at t: prehistory for t < 0 (and for t = 0 on an empty path),
  /// left limit at sample times, linear interpolation in between.
  /// OutOfRange beyond the horizon.
  void value_at(double t, SpectralField& out) const;
  SpectralField value_at(double t) const;
  /// Right limit at t: differs from value_at only at a jump time.
  void right_value_at(double t, SpectralField& out) const;

  SpectralField prehistory(double t) const { return psi_(t); }
  const Prehistory& prehistory_fn() const noexcept { return psi_; }

 private:
  Prehistory psi_;
  std::size_t n_modes_;
  std::vector<double> times_;
  std::vector<SpectralField> left_;
  std::vector<std::optional<SpectralField>> right_;
};

/// xi_tau: theta <= 0 -> xi(tau + theta). Holds a pointer to the path, which
/// must outlive the view.
class HistoryView {
 public:
  HistoryView(const HistoryPath& path, double tau);
  /// psi_tau for tau <= 0, reading the prehistory only.
  static HistoryView of_prehistory(const HistoryPath& path, double tau = 0.0);
  /// xi_{tau^+}: reads the right limit at theta = 0.
  static HistoryView right_limit(const HistoryPath& path, double tau);

  double tau() const noexcept { return tau_; }
  const HistoryPath& path() const noexcept { return *path_; }
  bool prehistory_only() const noexcept { return prehistory_only_; }

  SpectralField operator()(double theta) const;
  void value(double theta, SpectralField& out) const;

 private:
  HistoryView(const HistoryPath& path, double tau, bool prehistory_only, bool right_at_zero = false)
      : path_(&path), tau_(tau), prehistory_only_(prehistory_only), right_at_zero_(right_at_zero) {}
  const HistoryPath* path_;
  double tau_;
  bool prehistory_only_;
  bool right_at_zero_;
};

/// segment(path, tau) = xi_tau. OutOfRange if tau is beyond the horizon.
HistoryView segment(const HistoryPath& path, double tau);

/// Phase-space norm parameters. The tail integral over (-inf, 0] is
/// truncated at -tail_cutoff and evaluated by the trapezoid rule on
/// tail_points equally spaced nodes.
struct PhaseNormConfig {
  std::function<double(double)> tail_weight;  ///< y(s) >= 0 on s < 0
  double p = 2.0;
  double tail_cutoff = 20.0;
  std::size_t tail_points = 0;  ///< 0 means unset
  double N1 = 1.0;
  double N2_star = 1.0;
  double N3_star = 1.0;
  double J_star = 1.0;

  /// y(s) = exp(rate * s), the default weight with rate = 2.
  static PhaseNormConfig exponential(double rate = 2.0, double tail_cutoff = 20.0,
                                     std::size_t tail_points = 4001);
};

double phase_norm(const HistoryView& view, const PhaseNormConfig& cfg);

/// N_2(tau) = 1 + (int_{-tau}^0 y)^{1/2}.
double n2_of(const PhaseNormConfig& cfg, double tau);
/// N_3* = max(1, sup_{tau in [0,a]} G(-tau)^{1/2}), G(-tau) = sup_u y(u - tau)/y(u).
double n3_star(const PhaseNormConfig& cfg, double a);
/// J* = sup over tau in [rho_min, 0] of ||psi_tau|| / ||psi||.
double j_star(const HistoryPath& path, const PhaseNormConfig& cfg, double rho_min, std::size_t samples = 64);
/// Fill N2_star = N_2(a), N3_star and J_star for a horizon a and delay floor rho_min.
void fill_phase_constants(PhaseNormConfig& cfg, const HistoryPath& path, double a, double rho_min);

/// rho(tau, psi) = tau - sigma1(tau) sigma2(||psi(0)||). An empty sigma1
/// means no delay.
struct DelaySpec {
  std::function<double(double)> sigma1;
  std::function<double(double)> sigma2;
};

double eval_delay(const DelaySpec& spec, double tau, const HistoryView& view);
/// Same, with ||psi(0)|| already known.
double eval_delay_norm(const DelaySpec& spec, double tau, double norm_at_zero);

struct BoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool ok = false;
};

/// ||xi_tau|| against N2* sup_{[0,tau]} ||xi|| + (N3* + J*) ||psi||.
BoundCheck lemma31_bound_check(const HistoryPath& path, const PhaseNormConfig& cfg, double tau);

}  // namespace fracsee
