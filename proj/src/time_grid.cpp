#include "fracsee/time_grid.hpp"

#include <algorithm>
#include <cmath>

#include "fracsee/errors.hpp"

namespace fracsee {

TimeGrid::TimeGrid(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < 2) throw DomainError("time grid needs at least two nodes");
  if (nodes_.front() != 0.0) throw DomainError("time grid must start at 0");
  for (std::size_t k = 1; k < nodes_.size(); ++k) {
    if (!(nodes_[k] > nodes_[k - 1])) throw DomainError("time grid nodes must be strictly increasing");
  }
  nominal_step_ = nodes_.back() / static_cast<double>(nodes_.size() - 1);
}

TimeGrid TimeGrid::uniform(double a, double dt) {
  return with_breakpoints(a, dt, {});
}

TimeGrid TimeGrid::with_breakpoints(double a, double dt, std::span<const double> breakpoints) {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("horizon must be positive and finite");
  if (!(dt > 0.0) || dt > a) throw DomainError("time step must lie in (0, a]");
  const double snap = 1e-9 * dt;
  const auto n = static_cast<std::size_t>(std::floor(a / dt + 1e-9));
  std::vector<double> nodes;
  nodes.reserve(n + 2 + breakpoints.size());
  for (std::size_t k = 0; k <= n; ++k) nodes.push_back(std::min(static_cast<double>(k) * dt, a));
  if (a - nodes.back() > snap) nodes.push_back(a);
  nodes.back() = a;
  for (double b : breakpoints) {
    if (b < 0.0 || b > a) throw DomainError("breakpoint outside [0, a]");
    auto it = std::lower_bound(nodes.begin(), nodes.end(), b - snap);
    if (it != nodes.end() && std::abs(*it - b) <= snap) {
      *it = b;
    } else {
      nodes.insert(it, b);
    }
  }
  TimeGrid g(std::move(nodes));
  g.nominal_step_ = dt;
  return g;
}

bool TimeGrid::is_uniform(double rel_tol) const {
  const double h = step(0);
  for (std::size_t k = 1; k + 1 < nodes_.size(); ++k) {
    if (std::abs(step(k) - h) > rel_tol * h) return false;
  }
  return true;
}

std::size_t TimeGrid::find(double t, double tol) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), t - tol);
  if (it != nodes_.end() && std::abs(*it - t) <= tol) return static_cast<std::size_t>(it - nodes_.begin());
  return npos;
}

std::size_t TimeGrid::locate(double t) const {
  if (t <= nodes_.front()) return 0;
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
  return static_cast<std::size_t>(it - nodes_.begin()) - 1;
}

}  // namespace fracsee
