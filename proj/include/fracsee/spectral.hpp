#pragma once

// Diagonal sectorial operators on L^2(0, pi) and the action of the resolvent
// families on states stored as eigen-coefficients.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace fracsee {

/// A state in the eigenbasis: c_n with xi = sum_n c_n e_n.
class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(std::size_t n_modes) : c_(n_modes, 0.0) {}
  explicit SpectralField(std::vector<double> coeffs) : c_(std::move(coeffs)) {}
  SpectralField(std::initializer_list<double> coeffs) : c_(coeffs) {}

  std::size_t size() const noexcept { return c_.size(); }
  double& operator[](std::size_t n) { return c_[n]; }
  double operator[](std::size_t n) const { return c_[n]; }
  std::span<const double> coeffs() const noexcept { return c_; }
  std::span<double> coeffs() noexcept { return c_; }

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(double s);
  /// this += s * o
  SpectralField& axpy(double s, const SpectralField& o);

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }
  friend bool operator==(const SpectralField&, const SpectralField&) = default;

 private:
  std::vector<double> c_;
};

/// Parseval norm (sum c_n^2)^{1/2}.
double field_norm(const SpectralField& field);

enum class Basis { DirichletSine };

/// Diagonal operator acting as -mu_n on mode n.
struct OperatorSpec {
  std::vector<double> eigenvalues;
  Basis basis = Basis::DirichletSine;

  std::size_t n_modes() const noexcept { return eigenvalues.size(); }
  void validate() const;

  /// d^2/dx^2 on (0, pi) with Dirichlet conditions: mu_n = n^2.
  static OperatorSpec dirichlet_laplacian(std::size_t n_modes);
};

/// e_n(x) = sqrt(2/pi) sin(n x).
double sine_mode(std::size_t n, double x);

/// Physical quadrature grid on [0, pi] with composite Simpson weights and the
/// synthesis table e_n(x_p). Reused wherever fields go to physical space and
/// back.
class SineBasis {
 public:
  SineBasis(std::size_t n_modes, std::size_t panels);
  /// Default resolution: 8 panels per mode.
  explicit SineBasis(std::size_t n_modes) : SineBasis(n_modes, 8 * n_modes) {}

  std::size_t n_modes() const noexcept { return n_modes_; }
  std::size_t n_points() const noexcept { return points_.size(); }
  std::span<const double> points() const noexcept { return points_; }
  std::span<const double> weights() const noexcept { return weights_; }

  void synthesize(const SpectralField& field, std::span<double> values) const;
  std::vector<double> synthesize(const SpectralField& field) const;
  SpectralField project(std::span<const double> values) const;

 private:
  std::size_t n_modes_;
  std::vector<double> points_;
  std::vector<double> weights_;
  std::vector<double> table_;  // [p * n_modes + n]
};

/// c_n = int_0^pi f e_n by composite Simpson; panels must be even and at
/// least 8 * n_modes (ResolutionError otherwise).
SpectralField project(const std::function<double(double)>& f, const OperatorSpec& op,
                      std::size_t panels = 0);

/// (||f||^2 - sum c_n^2)^{1/2}: the part of f the truncated basis drops.
double truncation_tail_norm(const std::function<double(double)>& f, const OperatorSpec& op,
                            std::size_t fine_panels = 4096);

SpectralField apply_Tq(double t, double q, const SpectralField& field, const OperatorSpec& op);
SpectralField apply_Sq(double t, double q, const SpectralField& field, const OperatorSpec& op);

/// Observed sup over the given times and all modes of |T_q| and |S_q|; the
/// larger of the two is the resolvent bound M used by the existence check.
struct ResolventBound {
  double sup_T = 0.0;
  double sup_S = 0.0;
  double M() const { return sup_T > sup_S ? sup_T : sup_S; }
};
ResolventBound empirical_resolvent_bound(double q, const OperatorSpec& op, std::span<const double> times);

}  // namespace fracsee
