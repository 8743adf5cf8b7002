#include "fracsee/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fracsee/errors.hpp"
#include "fracsee/mlf.hpp"

namespace fracsee {

namespace {
void require_same_size(const SpectralField& a, const SpectralField& b) {
  if (a.size() != b.size()) throw DomainError("spectral fields differ in mode count");
}
}  // namespace

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  require_same_size(*this, o);
  for (std::size_t n = 0; n < c_.size(); ++n) c_[n] += o.c_[n];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  require_same_size(*this, o);
  for (std::size_t n = 0; n < c_.size(); ++n) c_[n] -= o.c_[n];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (double& c : c_) c *= s;
  return *this;
}

SpectralField& SpectralField::axpy(double s, const SpectralField& o) {
  require_same_size(*this, o);
  for (std::size_t n = 0; n < c_.size(); ++n) c_[n] += s * o.c_[n];
  return *this;
}

double field_norm(const SpectralField& field) {
  double acc = 0.0;
  for (double c : field.coeffs()) acc += c * c;
  return std::sqrt(acc);
}

void OperatorSpec::validate() const {
  if (eigenvalues.empty()) throw DomainError("operator needs at least one mode");
  for (std::size_t n = 0; n < eigenvalues.size(); ++n) {
    if (!(eigenvalues[n] > 0.0) || !std::isfinite(eigenvalues[n])) {
      throw DomainError("eigenvalue " + std::to_string(n + 1) + " must be positive and finite");
    }
    if (n > 0 && eigenvalues[n] < eigenvalues[n - 1]) {
      throw DomainError("eigenvalues must be nondecreasing");
    }
  }
}

OperatorSpec OperatorSpec::dirichlet_laplacian(std::size_t n_modes) {
  OperatorSpec op;
  op.eigenvalues.resize(n_modes);
  for (std::size_t n = 0; n < n_modes; ++n) op.eigenvalues[n] = static_cast<double>((n + 1) * (n + 1));
  op.validate();
  return op;
}

double sine_mode(std::size_t n, double x) {
  return std::sqrt(2.0 / std::numbers::pi) * std::sin(static_cast<double>(n) * x);
}

SineBasis::SineBasis(std::size_t n_modes, std::size_t panels) : n_modes_(n_modes) {
  if (n_modes == 0) throw DomainError("basis needs at least one mode");
  if (panels < 8 * n_modes || panels % 2 != 0) {
    throw ResolutionError("Simpson projection needs an even panel count >= 8 * n_modes (" +
                          std::to_string(8 * n_modes) + "), got " + std::to_string(panels));
  }
  const double h = std::numbers::pi / static_cast<double>(panels);
  points_.resize(panels + 1);
  weights_.resize(panels + 1);
  for (std::size_t p = 0; p <= panels; ++p) {
    points_[p] = h * static_cast<double>(p);
    const double w = (p == 0 || p == panels) ? 1.0 : (p % 2 == 1 ? 4.0 : 2.0);
    weights_[p] = w * h / 3.0;
  }
  table_.resize(points_.size() * n_modes);
  for (std::size_t p = 0; p < points_.size(); ++p) {
    for (std::size_t n = 0; n < n_modes; ++n) table_[p * n_modes + n] = sine_mode(n + 1, points_[p]);
  }
}

void SineBasis::synthesize(const SpectralField& field, std::span<double> values) const {
  if (field.size() != n_modes_ || values.size() != points_.size()) {
    throw DomainError("synthesize: size mismatch");
  }
  for (std::size_t p = 0; p < points_.size(); ++p) {
    const double* row = &table_[p * n_modes_];
    double acc = 0.0;
    for (std::size_t n = 0; n < n_modes_; ++n) acc += row[n] * field[n];
    values[p] = acc;
  }
}

std::vector<double> SineBasis::synthesize(const SpectralField& field) const {
  std::vector<double> values(points_.size());
  synthesize(field, values);
  return values;
}

SpectralField SineBasis::project(std::span<const double> values) const {
  if (values.size() != points_.size()) throw DomainError("project: size mismatch");
  SpectralField out(n_modes_);
  for (std::size_t p = 0; p < points_.size(); ++p) {
    const double wv = weights_[p] * values[p];
    if (wv == 0.0) continue;
    const double* row = &table_[p * n_modes_];
    for (std::size_t n = 0; n < n_modes_; ++n) out[n] += wv * row[n];
  }
  return out;
}

SpectralField project(const std::function<double(double)>& f, const OperatorSpec& op, std::size_t panels) {
  op.validate();
  const SineBasis basis(op.n_modes(), panels == 0 ? 8 * op.n_modes() : panels);
  std::vector<double> values(basis.n_points());
  for (std::size_t p = 0; p < values.size(); ++p) values[p] = f(basis.points()[p]);
  return basis.project(values);
}

double truncation_tail_norm(const std::function<double(double)>& f, const OperatorSpec& op,
                            std::size_t fine_panels) {
  const auto c = project(f, op, fine_panels);
  const SineBasis fine(1, fine_panels);
  double total = 0.0;
  for (std::size_t p = 0; p < fine.n_points(); ++p) {
    const double v = f(fine.points()[p]);
    total += fine.weights()[p] * v * v;
  }
  const double kept = field_norm(c);
  return std::sqrt(std::max(0.0, total - kept * kept));
}

SpectralField apply_Tq(double t, double q, const SpectralField& field, const OperatorSpec& op) {
  if (field.size() != op.n_modes()) throw DomainError("field and operator differ in mode count");
  SpectralField out = field;
  for (std::size_t n = 0; n < out.size(); ++n) out[n] *= mlf::relaxation_T(q, op.eigenvalues[n], t);
  return out;
}

SpectralField apply_Sq(double t, double q, const SpectralField& field, const OperatorSpec& op) {
  if (field.size() != op.n_modes()) throw DomainError("field and operator differ in mode count");
  SpectralField out = field;
  for (std::size_t n = 0; n < out.size(); ++n) out[n] *= mlf::relaxation_S(q, op.eigenvalues[n], t);
  return out;
}

ResolventBound empirical_resolvent_bound(double q, const OperatorSpec& op, std::span<const double> times) {
  ResolventBound b;
  for (double t : times) {
    for (double mu : op.eigenvalues) {
      b.sup_T = std::max(b.sup_T, std::abs(mlf::relaxation_T(q, mu, t)));
      b.sup_S = std::max(b.sup_S, std::abs(mlf::relaxation_S(q, mu, t)));
    }
  }
  return b;
}

}  // namespace fracsee
