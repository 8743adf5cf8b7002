#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>

#include "fracsee/dynamics.hpp"
#include "fracsee/errors.hpp"

namespace fracsee {

namespace {

// One application of the mild-solution map to an iterate. Everything that
// depends only on the grid, the schedule and the frozen noise is prepared
// once; apply() evaluates the coefficients on the iterate and assembles the
// branch formulas node by node.
class MildOperator {
 public:
  MildOperator(const ProblemSpec& spec, const TimeGrid& grid, const NoiseRealization& noise,
               const ResolventTable& table)
      : spec_(spec), grid_(grid), noise_(noise), table_(table), n_(spec.n_modes()) {
    if (table.n_modes() != n_) throw DomainError("resolvent table and operator disagree on the mode count");
    if (std::abs(grid.horizon() - spec.schedule.a) > 1e-9 * std::max(1.0, spec.schedule.a)) {
      throw DomainError("grid horizon differs from the schedule horizon a");
    }
    const std::size_t K = grid.size();
    branch_.reserve(K);
    for (std::size_t k = 0; k < K; ++k) branch_.push_back(classify_time(spec.schedule, grid[k]));
    for (std::size_t i = 0; i < spec.schedule.n_impulses(); ++i) {
      const std::size_t ri = grid.find(spec.schedule.r[i]);
      const std::size_t si = grid.find(spec.schedule.s[i]);
      if (ri == TimeGrid::npos || si == TimeGrid::npos) {
        throw DomainError("impulse points must be grid nodes");
      }
      r_idx_.push_back(ri);
      s_idx_.push_back(si);
    }
    window_.resize(K, 0);
    for (std::size_t k = 0; k < K; ++k) {
      if (branch_[k].kind == BranchKind::PostImpulse) window_[k] = s_idx_[branch_[k].index - 1];
    }
    // window end for each flow window: the last node before the next impulse
    // starts, or the end of the grid
    for (std::size_t e = 0; e < noise.events.size(); ++e) {
      const double te = noise.events[e].time;
      if (!(te > 0.0) || te > grid.horizon()) continue;
      const Branch b = classify_time(spec.schedule, te);
      if (b.kind == BranchKind::Impulse) continue;
      std::size_t first = grid.locate(te);
      if (grid[first] < te) ++first;
      std::size_t last = K - 1;
      const std::size_t next = b.kind == BranchKind::Initial ? 0 : b.index;
      if (next < r_idx_.size()) last = r_idx_[next];
      if (first > last) continue;
      EventKernel ek;
      ek.event = e;
      ek.first = first;
      ek.last = last;
      ek.s.resize((last - first + 1) * n_);
      std::vector<double> t_scratch(n_);
      for (std::size_t k = first; k <= last; ++k) {
        ResolventTable::evaluate(table.q(), spec.op, grid[k] - te, t_scratch,
                                 {ek.s.data() + (k - first) * n_, n_});
      }
      kernels_.push_back(std::move(ek));
    }
  }

  // Map the iterate X to the next one on nodes 0..k_end.
  HistoryPath apply(const HistoryPath& X, std::size_t k_end) const {
    const auto& c = spec_.coef;
    const std::size_t n_imp = r_idx_.size();
    const SpectralField psi0 = X.prehistory(0.0);
    if (psi0.size() != n_) throw DomainError("prehistory has wrong mode count");

    // delays and delayed segments at every node
    std::vector<std::optional<HistoryView>> views(k_end + 1);
    const bool need_views = c.b || c.f || c.h || has_m();
    auto view_at = [&](std::size_t j) -> const HistoryView& {
      if (!views[j]) {
        double norm = 0.0;
        if (spec_.delay.sigma1) norm = field_norm(j == 0 ? psi0 : X.value_at(grid_[j]));
        const double rho = j == 0 ? std::min(0.0, eval_delay_norm(spec_.delay, 0.0, norm))
                                  : eval_delay_norm(spec_.delay, grid_[j], norm);
        views[j] = delayed_view(X, rho);
      }
      return *views[j];
    };
    if (need_views) {
      for (std::size_t j = 0; j <= k_end; ++j) view_at(j);
    }

    auto needs_flow_data = [&](std::size_t j) {
      return branch_[j].kind != BranchKind::Impulse || is_s_node(j);
    };
    std::vector<SpectralField> b_val(k_end + 1), comp(k_end + 1), ito(k_end + 1);
    if (c.b) {
      for (std::size_t j = 0; j <= k_end; ++j) {
        if (needs_flow_data(j)) b_val[j] = checked(c.b(grid_[j], view_at(j)), "b");
      }
    }
    const bool jumps = c.f && spec_.noise.jump_rate_scale != 0.0;
    if (jumps) {
      for (std::size_t j = 0; j <= k_end; ++j) {
        if (!needs_flow_data(j)) continue;
        SpectralField acc(n_);
        for (const auto& m : spec_.noise.marks) {
          if (m.intensity == 0.0) continue;
          acc.axpy(m.intensity * spec_.noise.jump_rate_scale, checked(c.f(grid_[j], m.value, view_at(j)), "f"));
        }
        comp[j] = std::move(acc);
      }
    }
    const bool diffusion = c.h || c.k_fn;
    if (diffusion) {
      SpectralField running(n_);
      for (std::size_t j = 0; j <= k_end; ++j) {
        ito[j] = running;
        if (c.k_fn) ito[j] += checked(c.k_fn(grid_[j]), "k");
        if (c.h && j < k_end) {
          const NoiseOperator hj = c.h(grid_[j], view_at(j));
          if (hj.n_modes() != n_ || hj.n_noise() != noise_.dw.n_noise()) {
            throw DomainError("diffusion operator shape does not match the noise configuration");
          }
          hj.apply_add(noise_.dw, j, running);
        }
      }
    }
    std::vector<SpectralField> f_event(noise_.events.size());
    if (c.f) {
      for (const auto& ek : kernels_) {
        if (ek.first > k_end) continue;
        const auto& ev = noise_.events[ek.event];
        double norm = 0.0;
        if (spec_.delay.sigma1) norm = field_norm(X.value_at(ev.time));
        const HistoryView v = delayed_view(X, eval_delay_norm(spec_.delay, ev.time, norm));
        f_event[ek.event] = checked(c.f(ev.time, ev.mark, v), "f");
      }
    }

    const SpectralField zero(n_);
    const SpectralField k1 = c.k1 ? checked(c.k1(X), "k1") : zero;
    const SpectralField k2 = c.k2 ? checked(c.k2(X), "k2") : zero;
    const SpectralField b0 = c.b ? checked(c.b(0.0, HistoryView::of_prehistory(X, 0.0)), "b") : zero;
    SpectralField x0 = psi0 - k1 - b0;
    SpectralField v0 = spec_.xi1 - k2;

    // impulse values: l_i on the left segment at r_i (or at s_i)
    std::vector<SpectralField> l_val(n_imp, zero);
    for (std::size_t i = 0; i < n_imp; ++i) {
      if (r_idx_[i] > k_end || !map_l(i)) continue;
      const bool literal = spec_.restart == RestartConvention::LiteralSegment;
      if (literal && s_idx_[i] > k_end) continue;
      l_val[i] = checked(map_l(i)(segment(X, literal ? spec_.schedule.s[i] : spec_.schedule.r[i])), "l");
    }
    std::vector<SpectralField> l_left(n_imp, zero);
    if (spec_.restart == RestartConvention::LiteralSegment) {
      for (std::size_t i = 0; i < n_imp; ++i) {
        if (r_idx_[i] <= k_end && map_l(i)) l_left[i] = checked(map_l(i)(segment(X, spec_.schedule.r[i])), "l");
      }
    } else {
      l_left = l_val;
    }
    auto m_at = [&](std::size_t i, double t, const HistoryView& v) {
      return map_m(i) ? checked(map_m(i)(t, v), "m") : zero;
    };

    HistoryPath out(X.prehistory_fn(), n_);
    SpectralField value(n_);
    for (std::size_t k = 0; k <= k_end; ++k) {
      const Branch& br = branch_[k];
      if (br.kind == BranchKind::Impulse) {
        const std::size_t i = br.index - 1;
        value = l_left[i];
        value += m_at(i, grid_[k], view_at(k));
        out.append(grid_[k], value);
        continue;
      }
      const std::size_t w = window_[k];
      value = zero;
      const auto Tk = table_.T(k, w);
      if (br.kind == BranchKind::Initial) {
        const auto Sk = table_.S(k, 0);
        for (std::size_t n = 0; n < n_; ++n) value[n] = Tk[n] * x0[n] + Sk[n] * v0[n];
      } else {
        const std::size_t i = br.index - 1;
        SpectralField restart = l_val[i];
        restart += m_at(i, grid_[w], view_at(w));
        if (c.b) restart -= b_val[w];
        for (std::size_t n = 0; n < n_; ++n) value[n] = Tk[n] * restart[n];
      }
      if (c.b) value += b_val[k];
      for (std::size_t j = w; j < k; ++j) {
        const double dt = grid_.step(j);
        if (diffusion) {
          const auto T = table_.T(k, j);
          for (std::size_t n = 0; n < n_; ++n) value[n] += dt * T[n] * ito[j][n];
        }
        if (jumps) {
          const auto S = table_.S(k, j);
          for (std::size_t n = 0; n < n_; ++n) value[n] -= dt * S[n] * comp[j][n];
        }
      }
      if (c.f) {
        for (const auto& ek : kernels_) {
          if (ek.first > k || ek.last < k) continue;
          if (!(noise_.events[ek.event].time > grid_[w])) continue;
          const double* S = ek.s.data() + (k - ek.first) * n_;
          const auto& fe = f_event[ek.event];
          for (std::size_t n = 0; n < n_; ++n) value[n] += S[n] * fe[n];
        }
      }
      out.append(grid_[k], value);
    }

    // jump at r_i: right limit from the impulse formula
    for (std::size_t i = 0; i < n_imp; ++i) {
      const std::size_t ri = r_idx_[i];
      if (ri > k_end) continue;
      SpectralField right = l_left[i];
      if (map_m(i)) {
        const double r = spec_.schedule.r[i];
        double norm = 0.0;
        if (spec_.delay.sigma1) {
          SpectralField xr;
          X.right_value_at(r, xr);
          norm = field_norm(xr);
        }
        const double rho = eval_delay_norm(spec_.delay, r, norm);
        const HistoryView v = rho == r ? HistoryView::right_limit(X, r) : delayed_view(X, rho);
        right += m_at(i, r, v);
      }
      out.set_right_limit(ri, std::move(right));
    }
    return out;
  }

 private:
  struct EventKernel {
    std::size_t event = 0;
    std::size_t first = 0;
    std::size_t last = 0;
    std::vector<double> s;
  };

  bool has_m() const {
    for (const auto& m : spec_.schedule.maps) {
      if (m.m) return true;
    }
    return false;
  }
  bool is_s_node(std::size_t j) const { return std::find(s_idx_.begin(), s_idx_.end(), j) != s_idx_.end(); }
  const std::function<SpectralField(const HistoryView&)>& map_l(std::size_t i) const {
    static const std::function<SpectralField(const HistoryView&)> none;
    return i < spec_.schedule.maps.size() ? spec_.schedule.maps[i].l : none;
  }
  const std::function<SpectralField(double, const HistoryView&)>& map_m(std::size_t i) const {
    static const std::function<SpectralField(double, const HistoryView&)> none;
    return i < spec_.schedule.maps.size() ? spec_.schedule.maps[i].m : none;
  }
  SpectralField checked(SpectralField v, const char* what) const {
    if (v.size() != n_) throw DomainError(std::string("coefficient ") + what + " returned a field of wrong size");
    return v;
  }

  const ProblemSpec& spec_;
  const TimeGrid& grid_;
  const NoiseRealization& noise_;
  const ResolventTable& table_;
  std::size_t n_;
  std::vector<Branch> branch_;
  std::vector<std::size_t> r_idx_, s_idx_, window_;
  std::vector<EventKernel> kernels_;
};

HistoryPath initial_iterate(const ProblemSpec& spec, const TimeGrid& grid, const ResolventTable& table) {
  HistoryPath path(spec.psi, spec.n_modes());
  const SpectralField psi0 = spec.psi(0.0);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    SpectralField v(spec.n_modes());
    const auto T = table.T(k, 0);
    for (std::size_t n = 0; n < v.size(); ++n) v[n] = T[n] * psi0[n];
    path.append(grid[k], std::move(v));
  }
  return path;
}

double sq_distance(const HistoryPath& a, const HistoryPath& b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    worst = std::max(worst, std::pow(field_norm(a.left(k) - b.left(k)), 2));
    if (a.is_jump(k) || b.is_jump(k)) worst = std::max(worst, std::pow(field_norm(a.right(k) - b.right(k)), 2));
  }
  return worst;
}

}  // namespace

SpectralField mild_eval(const ProblemSpec& spec, const TimeGrid& grid, const NoiseRealization& noise,
                        const HistoryPath& path, std::size_t k) {
  if (k >= grid.size()) throw OutOfRange("node index beyond the grid");
  const ResolventTable table(spec.q, spec.op, grid);
  const MildOperator op(spec, grid, noise, table);
  try {
    const HistoryPath next = op.apply(path, k);
    return next.left(k);
  } catch (const OutOfRange& e) {
    throw UnresolvedDelay(std::string("history needed beyond the available path: ") + e.what());
  }
}

PicardResult picard_solve(const ProblemSpec& spec, const TimeGrid& grid, const NoiseRealization& noise,
                          const PicardOptions& options) {
  const ResolventTable table(spec.q, spec.op, grid);
  return picard_solve(spec, grid, noise, table, options);
}

PicardResult picard_solve(const ProblemSpec& spec, const TimeGrid& grid, const NoiseRealization& noise,
                          const ResolventTable& table, const PicardOptions& options) {
  spec.validate();
  const MildOperator op(spec, grid, noise, table);
  PicardResult result{initial_iterate(spec, grid, table), {}, 0};
  for (std::size_t it = 0; it < options.max_iter; ++it) {
    HistoryPath next = op.apply(result.path, grid.size() - 1);
    const double d = sq_distance(next, result.path);
    result.distances.push_back(d);
    result.path = std::move(next);
    result.sweeps = it + 1;
    if (!std::isfinite(d)) break;
    if (d < options.tol) return result;
  }
  throw MaxIterations("Picard iteration did not reach tolerance " + std::to_string(options.tol) + " in " +
                          std::to_string(result.sweeps) + " sweeps",
                      result.distances);
}

EnsembleStats simulate_ensemble(const ProblemSpec& spec, const TimeGrid& grid, const EnsembleOptions& options) {
  spec.validate();
  if (options.n_paths == 0) throw DomainError("ensemble needs at least one path");
  const ResolventTable table(spec.q, spec.op, grid);
  const std::size_t K = grid.size();
  const std::size_t n = spec.n_modes();

  struct PathOut {
    std::vector<double> values;  // K * n left values
    std::size_t jumps = 0;
    std::size_t sweeps = 0;
    std::optional<HistoryPath> path;
  };
  std::vector<PathOut> outs(options.n_paths);
  std::vector<std::exception_ptr> errors(options.n_paths);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t p = next++; p < options.n_paths; p = next++) {
      try {
        NoiseConfig cfg = spec.noise;
        cfg.rng_seed = options.base_seed;
        const NoiseRealization noise = NoiseRealization::sample(grid, cfg, p);
        PicardResult r = picard_solve(spec, grid, noise, table, options.picard);
        PathOut& o = outs[p];
        o.values.resize(K * n);
        for (std::size_t k = 0; k < K; ++k) {
          std::copy_n(r.path.left(k).coeffs().begin(), n, o.values.begin() + static_cast<long>(k * n));
        }
        o.jumps = noise.events.size();
        o.sweeps = r.sweeps;
        if (options.keep_paths) o.path.emplace(std::move(r.path));
      } catch (...) {
        errors[p] = std::current_exception();
      }
    }
  };
  std::size_t threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, options.n_paths);
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  EnsembleStats st;
  st.mean_field.assign(K, SpectralField(n));
  st.mean_sq_norm.assign(K, 0.0);
  st.var_sq_norm.assign(K, 0.0);
  const double np = static_cast<double>(options.n_paths);
  for (const auto& o : outs) {
    for (std::size_t k = 0; k < K; ++k) {
      double sq = 0.0;
      for (std::size_t m = 0; m < n; ++m) {
        const double v = o.values[k * n + m];
        st.mean_field[k][m] += v / np;
        sq += v * v;
      }
      st.mean_sq_norm[k] += sq / np;
    }
    st.jump_counts.push_back(o.jumps);
    st.sweeps.push_back(o.sweeps);
  }
  if (options.n_paths > 1) {
    for (const auto& o : outs) {
      for (std::size_t k = 0; k < K; ++k) {
        double sq = 0.0;
        for (std::size_t m = 0; m < n; ++m) sq += o.values[k * n + m] * o.values[k * n + m];
        const double d = sq - st.mean_sq_norm[k];
        st.var_sq_norm[k] += d * d / (np - 1.0);
      }
    }
  }
  if (options.keep_paths) {
    for (auto& o : outs) st.paths.push_back(std::move(*o.path));
  }
  return st;
}

std::vector<ContinuityGap> branch_continuity_check(const HistoryPath& path, const ProblemSpec& spec) {
  std::vector<ContinuityGap> out;
  const auto& sch = spec.schedule;
  const std::size_t n = spec.n_modes();
  for (std::size_t i = 0; i < sch.n_impulses(); ++i) {
    const double r = sch.r[i], s = sch.s[i];
    if (s > path.horizon()) break;
    const ImpulseMaps* maps = i < sch.maps.size() ? &sch.maps[i] : nullptr;
    double norm = 0.0;
    if (spec.delay.sigma1) norm = field_norm(path.value_at(s));
    const HistoryView v = delayed_view(path, eval_delay_norm(spec.delay, s, norm));
    const SpectralField m = maps && maps->m ? maps->m(s, v) : SpectralField(n);
    const SpectralField impulse = (maps && maps->l ? maps->l(segment(path, r)) : SpectralField(n)) + m;
    SpectralField restart = spec.restart == RestartConvention::LiteralSegment
                                ? (maps && maps->l ? maps->l(segment(path, s)) : SpectralField(n)) + m
                                : impulse;
    // restart formula at s_i^+: T_q(0)[restart - b(s_i)] + b(s_i)
    const SpectralField b = spec.coef.b ? spec.coef.b(s, v) : SpectralField(n);
    const SpectralField flow = apply_Tq(0.0, spec.q, restart - b, spec.op) + b;
    out.push_back({s, field_norm(flow - impulse)});
  }
  return out;
}

}  // namespace fracsee
