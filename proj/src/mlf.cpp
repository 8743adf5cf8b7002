#include "fracsee/mlf.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "fracsee/errors.hpp"

namespace fracsee::mlf {
namespace {

constexpr int kSeriesTermCap = 250;
constexpr double kSeriesStop = 1e-16;
// Largest |z|^{1/alpha} summed by series on the negative axis.
constexpr double kSeriesCancellationLimit = 10.0;

// 1/Gamma(x), zero at the poles.
double rgamma(double x) {
  if (x <= 0.0 && x == std::floor(x)) return 0.0;
  if (x < 170.0) return 1.0 / std::tgamma(x);
  return std::exp(-std::lgamma(x));
}

// Returns false if the series did not settle within the term cap. Terms are
// accumulated with Neumaier compensation.
bool series(double alpha, double beta, double z, double& out) {
  double sum = rgamma(beta);
  double carry = 0.0;
  const double logabs = std::log(std::abs(z));
  const bool negative = z < 0.0;
  double prev = std::abs(sum);
  for (int k = 1; k < kSeriesTermCap; ++k) {
    const double arg = alpha * k + beta;
    double mag;
    if (arg < 170.0) {
      mag = std::pow(std::abs(z), k) / std::tgamma(arg);
    } else {
      mag = std::exp(k * logabs - std::lgamma(arg));
    }
    const double term = (negative && (k % 2 == 1)) ? -mag : mag;
    const double next = sum + term;
    carry += std::abs(sum) >= std::abs(term) ? (sum - next) + term : (term - next) + sum;
    sum = next;
    // terms decay monotonically once past the peak
    if (mag <= kSeriesStop * std::max(std::abs(sum), 1.0) && mag <= prev) {
      out = sum + carry;
      return true;
    }
    prev = mag;
  }
  out = sum + carry;
  return false;
}

// alpha == 1 with integer beta = m: E_{1,m}(z) = z^{1-m}(e^z - sum_{k<m-1} z^k/k!).
double alpha_one_closed(double beta, double z) {
  const int m = static_cast<int>(beta);
  double partial = 0.0, term = 1.0;
  for (int k = 0; k < m - 1; ++k) {
    partial += term;
    term *= z / (k + 1);
  }
  return std::pow(z, 1 - m) * (std::exp(z) - partial);
}

// E_{alpha,beta}(-x), x > 0, alpha != 1, via the branch-cut integral.
double negative_axis_integral(double alpha, double beta, double x) {
  using std::numbers::pi;
  const double s_ab = std::sin((alpha - beta) * pi);
  const double s_b = std::sin(beta * pi);
  const double c_a = std::cos(alpha * pi);
  auto integrand = [&](double r) {
    const double ra = std::pow(r, alpha);
    const double den = ra * ra + 2.0 * x * ra * c_a + x * x;
    return std::exp(-r) * std::pow(r, alpha - beta) * (x * s_ab - ra * s_b) / den;
  };
  double value = 0.0;
  if (s_ab != 0.0 || s_b != 0.0) {
    boost::math::quadrature::exp_sinh<double> integrator;
    double err = 0.0;
    value = -integrator.integrate(integrand, 1e-14, &err) / pi;
  }
  if (alpha > 1.0) {
    const std::complex<double> pole = std::polar(std::pow(x, 1.0 / alpha), pi / alpha);
    value += (2.0 / alpha) * std::real(std::exp(pole) * std::pow(pole, 1.0 - beta));
  }
  return value;
}

void check_order(double q) {
  if (!(q > 1.0 && q < 2.0)) throw DomainError("order q must lie in (1,2), got " + std::to_string(q));
}

void check_kernel_args(double mu, double t) {
  if (!std::isfinite(mu) || mu < 0.0) throw DomainError("eigenvalue mu must be finite and >= 0");
  if (!std::isfinite(t) || t < 0.0) throw DomainError("time must be finite and >= 0");
}

}  // namespace

void validate(const MlParams& p) {
  if (!(p.alpha > 0.0 && p.alpha <= 2.0)) throw DomainError("alpha must lie in (0,2]");
  if (!(p.beta > 0.0 && p.beta <= 10.0)) throw DomainError("beta must lie in (0,10]");
}

double ml_eval(const MlParams& params, double z, double overflow_bound) {
  validate(params);
  if (!std::isfinite(z)) throw DomainError("argument must be finite");
  if (std::abs(z) > overflow_bound) {
    throw OverflowError("|z| = " + std::to_string(std::abs(z)) + " exceeds bound " +
                        std::to_string(overflow_bound));
  }
  const double alpha = params.alpha, beta = params.beta;
  if (z == 0.0) return rgamma(beta);

  const bool series_safe =
      z > 0.0 || std::pow(-z, 1.0 / alpha) <= kSeriesCancellationLimit;
  if (series_safe) {
    double out = 0.0;
    if (series(alpha, beta, z, out)) return out;
    if (z > 0.0) throw OverflowError("power series did not converge within the term cap");
  }
  if (alpha == 1.0) {
    if (beta == std::floor(beta)) return alpha_one_closed(beta, z);
    throw DomainError("alpha = 1 with non-integer beta is only supported in the series range");
  }
  return negative_axis_integral(alpha, beta, -z);
}

double relaxation_T(double q, double mu, double t) {
  check_order(q);
  check_kernel_args(mu, t);
  if (t == 0.0 || mu == 0.0) return 1.0;
  return ml_eval({q, 1.0}, -mu * std::pow(t, q));
}

double relaxation_S(double q, double mu, double t) {
  check_order(q);
  check_kernel_args(mu, t);
  if (t == 0.0) return 0.0;
  if (mu == 0.0) return t;
  return t * ml_eval({q, 2.0}, -mu * std::pow(t, q));
}

std::vector<double> fractional_integral(std::span<const double> g, double q, const TimeGrid& grid) {
  if (!(q > 0.0)) throw DomainError("fractional integral order must be positive");
  if (g.size() != grid.size()) throw DomainError("samples and grid differ in length");
  const double scale = 1.0 / std::tgamma(q + 1.0);
  std::vector<double> out(grid.size(), 0.0);
  for (std::size_t k = 1; k < grid.size(); ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const double w = std::pow(grid[k] - grid[j], q) - std::pow(grid[k] - grid[j + 1], q);
      acc += w * g[j];
    }
    out[k] = scale * acc;
  }
  return out;
}

double caputo_residual(std::span<const double> x, double q, std::span<const double> rhs,
                       const TimeGrid& grid, double initial_velocity, double from_time) {
  check_order(q);
  if (!grid.is_uniform()) throw DomainError("caputo_residual requires a uniform grid");
  if (x.size() != grid.size() || rhs.size() != grid.size()) {
    throw DomainError("samples and grid differ in length");
  }
  const double h = grid.step(0);
  const std::size_t n_nodes = grid.size();
  // y_0 = x'(0), y_k = (x_k - x_{k-1})/h; L1 scheme of order q-1 on y.
  std::vector<double> dy(n_nodes, 0.0);
  double prev = initial_velocity;
  for (std::size_t k = 1; k < n_nodes; ++k) {
    const double y = (x[k] - x[k - 1]) / h;
    dy[k] = y - prev;
    prev = y;
  }
  std::vector<double> b(n_nodes, 0.0);
  for (std::size_t j = 0; j < n_nodes; ++j) {
    b[j] = std::pow(j + 1.0, 2.0 - q) - std::pow(static_cast<double>(j), 2.0 - q);
  }
  const double scale = std::pow(h, 1.0 - q) / std::tgamma(3.0 - q);
  double worst = 0.0;
  for (std::size_t n = 1; n < n_nodes; ++n) {
    if (grid[n] < from_time - 1e-12) continue;
    double acc = 0.0;
    for (std::size_t k = 1; k <= n; ++k) acc += b[n - k] * dy[k];
    worst = std::max(worst, std::abs(scale * acc - rhs[n]));
  }
  return worst;
}

}  // namespace fracsee::mlf
