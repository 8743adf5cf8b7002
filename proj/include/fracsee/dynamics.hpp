#pragma once

// Mild-solution evaluation for the neutral fractional stochastic system with
// non-instantaneous impulses and state-dependent delay, the Picard iteration
// that resolves its implicit state dependence, and the Monte Carlo wrapper.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fracsee/noise.hpp"
#include "fracsee/phase_space.hpp"
#include "fracsee/spectral.hpp"
#include "fracsee/time_grid.hpp"

namespace fracsee {

/// l_i acts on the segment xi_{r_i}; m_i on (tau, xi_{rho(tau, xi_tau)}).
struct ImpulseMaps {
  std::function<SpectralField(const HistoryView&)> l;
  std::function<SpectralField(double, const HistoryView&)> m;
};

/// 0 = s_0 < r_1 < s_1 < ... < s_N < r_{N+1} = a. The impulse acts on
/// (r_i, s_i]; the flow restarts from s_i.
struct ImpulseSchedule {
  std::vector<double> r;  ///< r_1..r_N
  std::vector<double> s;  ///< s_1..s_N
  double a = 1.0;
  std::vector<ImpulseMaps> maps;  ///< one per impulse; empty handles mean zero

  std::size_t n_impulses() const noexcept { return r.size(); }
  /// Every violated interleaving constraint, collected.
  std::vector<std::string> problems() const;
  void validate() const;  ///< ValidationError listing problems()
  std::vector<double> breakpoints() const;
};

enum class BranchKind { Initial, Impulse, PostImpulse };

struct Branch {
  BranchKind kind = BranchKind::Initial;
  std::size_t index = 0;  ///< i for Impulse(i) / PostImpulse(i), 0 for Initial
  std::string label() const;
  friend bool operator==(const Branch&, const Branch&) = default;
};

/// [0, r_1] -> Initial, (r_i, s_i] -> Impulse(i), (s_i, r_{i+1}] -> PostImpulse(i).
Branch classify_time(const ImpulseSchedule& schedule, double tau);

struct Coefficients {
  std::function<SpectralField(double, const HistoryView&)> b;          ///< neutral term
  std::function<SpectralField(double, double, const HistoryView&)> f;  ///< jump amplitude f(t, mark, .)
  std::function<NoiseOperator(double, const HistoryView&)> h;          ///< diffusion
  std::function<SpectralField(const HistoryPath&)> k1;                 ///< nonlocal initial value
  std::function<SpectralField(const HistoryPath&)> k2;                 ///< nonlocal initial velocity
  std::function<SpectralField(double)> k_fn;  ///< int_{-inf}^0 h dw, injected deterministically
};

/// Which segment feeds l_i in the restart term after s_i. ContinuousAtS
/// restarts from xi(s_i) = l_i(xi_{r_i}) + m_i(s_i, .), so the path is
/// continuous at s_i; LiteralSegment evaluates l_i(xi_{s_i}).
enum class RestartConvention { ContinuousAtS, LiteralSegment };

struct ProblemSpec {
  double q = 1.5;
  OperatorSpec op;
  ImpulseSchedule schedule;
  Coefficients coef;
  DelaySpec delay;
  Prehistory psi;
  SpectralField xi1;
  NoiseConfig noise;
  PhaseNormConfig phase;
  RestartConvention restart = RestartConvention::ContinuousAtS;

  std::size_t n_modes() const noexcept { return op.n_modes(); }
  void validate() const;
};

/// Frozen noise for one path.
struct NoiseRealization {
  WienerIncrements dw;
  std::vector<PoissonEvent> events;

  static NoiseRealization sample(const TimeGrid& grid, const NoiseConfig& cfg);
  static NoiseRealization sample(const TimeGrid& grid, const NoiseConfig& cfg, std::uint64_t stream_id);
  static NoiseRealization none(const TimeGrid& grid, const NoiseConfig& cfg);
};

/// T_q and S_q symbols at every node difference t_k - t_j, k >= j.
class ResolventTable {
 public:
  ResolventTable(double q, const OperatorSpec& op, const TimeGrid& grid);
  std::span<const double> T(std::size_t k, std::size_t j) const { return row(t_, slot(k, j)); }
  std::span<const double> S(std::size_t k, std::size_t j) const { return row(s_, slot(k, j)); }
  std::size_t n_modes() const noexcept { return n_modes_; }
  double q() const noexcept { return q_; }

  /// Symbols at an arbitrary lag dt >= 0.
  static void evaluate(double q, const OperatorSpec& op, double dt, std::span<double> t_out,
                       std::span<double> s_out);

 private:
  std::size_t slot(std::size_t k, std::size_t j) const {
    return uniform_ ? k - j : pair_slot_[k * n_nodes_ + j];
  }
  std::span<const double> row(const std::vector<double>& v, std::size_t s) const {
    return {v.data() + s * n_modes_, n_modes_};
  }
  double q_;
  std::size_t n_modes_;
  std::size_t n_nodes_;
  bool uniform_;
  std::vector<std::uint32_t> pair_slot_;
  std::vector<double> t_;
  std::vector<double> s_;
};

/// Value of the mild-solution formula at node k, with every history lookup
/// (delays, segments, nonlocal terms) read from `path`. Lookups beyond the
/// path's horizon raise UnresolvedDelay.
SpectralField mild_eval(const ProblemSpec& spec, const TimeGrid& grid, const NoiseRealization& noise,
                        const HistoryPath& path, std::size_t k);

struct PicardOptions {
  double tol = 1e-10;  ///< on max_k ||zeta^{(n+1)}(t_k) - zeta^{(n)}(t_k)||^2
  std::size_t max_iter = 50;
};

struct PicardResult {
  HistoryPath path;
  std::vector<double> distances;  ///< one per sweep
  std::size_t sweeps = 0;
};

/// Full-sweep Picard iteration on the mild-solution operator starting from
/// xi = T_q(t) psi(0) (zeta = 0). Every sweep reads the previous iterate for
/// all history lookups. MaxIterations if the tolerance is not reached.
PicardResult picard_solve(const ProblemSpec& spec, const TimeGrid& grid, const NoiseRealization& noise,
                          const PicardOptions& options = {});
PicardResult picard_solve(const ProblemSpec& spec, const TimeGrid& grid, const NoiseRealization& noise,
                          const ResolventTable& table, const PicardOptions& options = {});

struct EnsembleOptions {
  std::size_t n_paths = 1;
  std::uint64_t base_seed = 0;
  std::size_t threads = 0;  ///< 0: hardware concurrency
  bool keep_paths = false;
  PicardOptions picard;
};

struct EnsembleStats {
  std::vector<SpectralField> mean_field;  ///< per node
  std::vector<double> mean_sq_norm;       ///< E||xi(t_k)||^2
  std::vector<double> var_sq_norm;        ///< sample variance of ||xi(t_k)||^2
  std::vector<std::size_t> jump_counts;   ///< Poisson events per path
  std::vector<std::size_t> sweeps;        ///< Picard sweeps per path
  std::vector<HistoryPath> paths;         ///< when keep_paths
};

/// Path p uses stream_id = p and seed = base_seed. Paths run concurrently;
/// the reduction is in path order, so results do not depend on threading.
EnsembleStats simulate_ensemble(const ProblemSpec& spec, const TimeGrid& grid, const EnsembleOptions& options);

struct ContinuityGap {
  double s = 0.0;
  double gap = 0.0;
};

/// || restart formula at s_i^+ - impulse formula at s_i ||, both evaluated on
/// the given path.
std::vector<ContinuityGap> branch_continuity_check(const HistoryPath& path, const ProblemSpec& spec);

/// Delayed segment xi_{rho}: the prehistory view for rho <= 0.
HistoryView delayed_view(const HistoryPath& path, double rho);

}  // namespace fracsee
