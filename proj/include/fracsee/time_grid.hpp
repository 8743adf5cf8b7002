#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fracsee {

/// Sorted, distinct time nodes 0 = t_0 < ... < t_K = a. Breakpoints (impulse
/// points) are always nodes.
class TimeGrid {
 public:
  TimeGrid() = default;
  explicit TimeGrid(std::vector<double> nodes);

  /// Uniform nodes k*dt on [0, a]; the last step is shortened if a is not a
  /// multiple of dt.
  static TimeGrid uniform(double a, double dt);

  /// Uniform grid with every breakpoint forced onto the node set. Breakpoints
  /// within 1e-9*dt of an existing node are snapped to it.
  static TimeGrid with_breakpoints(double a, double dt, std::span<const double> breakpoints);

  std::size_t size() const noexcept { return nodes_.size(); }
  double operator[](std::size_t k) const { return nodes_[k]; }
  double horizon() const { return nodes_.back(); }
  double step(std::size_t k) const { return nodes_[k + 1] - nodes_[k]; }
  double nominal_step() const noexcept { return nominal_step_; }
  bool is_uniform(double rel_tol = 1e-9) const;
  std::span<const double> nodes() const noexcept { return nodes_; }

  /// Index of the node equal to t (within tol), or npos.
  std::size_t find(double t, double tol = 1e-9) const;
  /// Largest k with t_k <= t (t clamped to the grid range).
  std::size_t locate(double t) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::vector<double> nodes_;
  double nominal_step_ = 0.0;
};

}  // namespace fracsee
