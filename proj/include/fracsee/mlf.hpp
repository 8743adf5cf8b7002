#pragma once

// Two-parameter Mittag-Leffler function and the scalar relaxation kernels
// that diagonalize the resolvent families T_q, S_q of a self-adjoint
// negative operator.

#include <span>
#include <vector>

#include "fracsee/time_grid.hpp"

namespace fracsee::mlf {

struct MlParams {
  double alpha = 1.0;  ///< order, 0 < alpha <= 2
  double beta = 1.0;   ///< 0 < beta <= 10
};

void validate(const MlParams& p);

/// Default |z| bound; beyond it ml_eval raises OverflowError.
inline constexpr double kDefaultOverflowBound = 1.0e6;

/// E_{alpha,beta}(z) for real z.
///
/// The power series is summed while it is numerically safe (z >= 0, or
/// |z|^{1/alpha} <= 10 so cancellation stays below ~1e-11). Further out on the
/// negative axis the Bromwich integral of s^{alpha-beta}/(s^alpha + x) is
/// collapsed onto the branch cut, giving a real integral over (0, inf) plus,
/// for alpha > 1, the residues at x^{1/alpha} e^{+-i pi/alpha}.
double ml_eval(const MlParams& params, double z, double overflow_bound = kDefaultOverflowBound);

/// E_{q,1}(-mu t^q): mode-wise symbol of T_q(t) for eigenvalue -mu.
double relaxation_T(double q, double mu, double t);
/// t E_{q,2}(-mu t^q): mode-wise symbol of S_q(t).
double relaxation_S(double q, double mu, double t);

/// Riemann-Liouville integral J^q g on the grid nodes by product-rectangle
/// quadrature (kernel integrated exactly against left-point constant data).
std::vector<double> fractional_integral(std::span<const double> g, double q, const TimeGrid& grid);

/// max |D^q x(t_n) - rhs(t_n)| over nodes t_n >= max(from_time, t_1) for the
/// Caputo derivative of order q in (1,2), using the L1 scheme on x' with
/// x'(0) = initial_velocity. Validation aid only; requires a uniform grid.
///
/// Solutions of relaxation problems have x'' ~ t^{q-2} at the origin, and the
/// scheme's error at the first few nodes does not shrink with the step;
/// from_time > 0 measures the residual away from that layer.
double caputo_residual(std::span<const double> x, double q, std::span<const double> rhs,
                       const TimeGrid& grid, double initial_velocity, double from_time = 0.0);

}  // namespace fracsee::mlf
