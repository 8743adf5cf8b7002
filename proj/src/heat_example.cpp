#include "fracsee/heat_example.hpp"

#include <cmath>
#include <memory>
#include <numbers>

#include "fracsee/errors.hpp"

namespace fracsee {

namespace {

using std::numbers::pi;

double weight_value(KernelWeight w, double v) { return w == KernelWeight::One ? 1.0 : std::sin(v); }

double weight_norm_sq(KernelWeight w) { return w == KernelWeight::One ? pi : pi / 2.0; }

double shape_value(KernelShape s, double x) {
  switch (s) {
    case KernelShape::Tanh:
      return std::tanh(x);
    case KernelShape::Sine:
      return std::sin(x);
    case KernelShape::Linear:
      return x;
  }
  return x;
}

SpectralField profile_field(Profile shape, double amp, std::size_t n_modes) {
  SpectralField out(n_modes);
  if (shape == Profile::Sine) {
    out[0] = amp * std::sqrt(pi / 2.0);
  } else if (shape == Profile::Parabola) {
    for (std::size_t n = 1; n <= n_modes; n += 2) {
      out[n - 1] = amp * 4.0 * std::sqrt(2.0 / pi) / std::pow(static_cast<double>(n), 3);
    }
  }
  return out;
}

// int_{-inf}^0 exp(kappa theta) F(view(theta)) dtheta, where the prehistory is
// constant in time (so its part is F(psi) exp(-kappa rho) / kappa exactly) and
// the recorded part is integrated by the trapezoid rule over the samples.
template <class Transform>
std::vector<double> exp_memory(const HistoryView& view, double kappa, std::span<const double> f_psi,
                               Transform&& F) {
  const std::size_t m = f_psi.size();
  std::vector<double> acc(m);
  const double rho = view.tau();
  const double pre = view.prehistory_only() || rho <= 0.0 ? 1.0 / kappa : std::exp(-kappa * rho) / kappa;
  for (std::size_t p = 0; p < m; ++p) acc[p] = pre * f_psi[p];
  if (view.prehistory_only() || rho <= 0.0) return acc;

  const HistoryPath& path = view.path();
  const auto times = path.times();
  std::vector<double> fa(m), fb(m);
  bool fb_valid = false;
  for (std::size_t j = 0; j < times.size() && times[j] < rho; ++j) {
    const double t0 = times[j];
    if (!fb_valid || path.is_jump(j)) F(path.right(j), std::span<double>(fa));
    else fa.swap(fb);
    double t1;
    if (j + 1 < times.size() && times[j + 1] <= rho) {
      t1 = times[j + 1];
      F(path.left(j + 1), std::span<double>(fb));
    } else {
      t1 = rho;
      F(path.value_at(rho), std::span<double>(fb));
    }
    fb_valid = true;
    const double e0 = std::exp(kappa * (t0 - rho)), e1 = std::exp(kappa * (t1 - rho));
    const double h = 0.5 * (t1 - t0);
    for (std::size_t p = 0; p < m; ++p) acc[p] += h * (e0 * fa[p] + e1 * fb[p]);
  }
  return acc;
}

// psi -> c w(v) int exp(kappa varpi) s(psi(varpi)(v)) dvarpi, evaluated on
// the physical grid and projected back.
class MemoryTerm {
 public:
  MemoryTerm(const SeparableKernel& k, std::shared_ptr<const SineBasis> basis, const SpectralField& psi)
      : k_(k), basis_(std::move(basis)) {
    const auto x = basis_->points();
    w_.resize(x.size());
    for (std::size_t p = 0; p < x.size(); ++p) w_[p] = k.c * weight_value(k.w, x[p]);
    s_psi_ = basis_->synthesize(psi);
    for (double& v : s_psi_) v = shape_value(k.s, v);
  }

  SpectralField operator()(const HistoryView& view) const {
    const SineBasis& basis = *basis_;
    const KernelShape shape = k_.s;
    auto F = [&](const SpectralField& field, std::span<double> out) {
      basis.synthesize(field, out);
      for (double& v : out) v = shape_value(shape, v);
    };
    std::vector<double> vals = exp_memory(view, k_.kappa, s_psi_, F);
    for (std::size_t p = 0; p < vals.size(); ++p) vals[p] *= w_[p];
    return basis.project(vals);
  }

 private:
  SeparableKernel k_;
  std::shared_ptr<const SineBasis> basis_;
  std::vector<double> w_;
  std::vector<double> s_psi_;
};

struct Growth {
  double constant = 0.0;  // A(r) = constant + linear * r
  double linear = 0.0;
};

Growth growth_of(const SeparableKernel& k, double tail_rate, const char* name) {
  if (k.c == 0.0) return {};
  if (k.s == KernelShape::Linear) {
    if (!(2.0 * k.kappa > tail_rate)) {
      throw UnsupportedKernel(std::string(name) + ": a linear shape needs 2 kappa > tail rate for a finite bound");
    }
    return {0.0, k.c * k.c / (2.0 * k.kappa - tail_rate)};
  }
  return {k.c * k.c * weight_norm_sq(k.w) / (k.kappa * k.kappa), 0.0};
}

void kernel_problems(std::vector<std::string>& out, const SeparableKernel& k, const std::string& name) {
  if (!std::isfinite(k.c)) out.push_back(name + " amplitude must be finite");
  if (k.c != 0.0 && !(k.kappa > 0.0)) out.push_back(name + " decay rate kappa must be > 0");
}

}  // namespace

std::vector<std::string> HeatExampleConfig::problems() const {
  std::vector<std::string> p;
  if (n_modes == 0) p.push_back("n_modes must be >= 1");
  if (!(q > 1.0 && q < 2.0)) p.push_back("fractional order q = " + std::to_string(q) + " must lie in (1, 2)");
  ImpulseSchedule sch;
  sch.r = r;
  sch.s = s;
  sch.a = a;
  for (auto& x : sch.problems()) p.push_back(std::move(x));
  const std::size_t N = r.size();
  auto sized = [&](std::size_t got, const char* name) {
    if (got != 0 && got != N) {
      p.push_back(std::string(name) + " has " + std::to_string(got) + " entries, expected " + std::to_string(N));
    }
  };
  sized(impulse_alpha.size(), "impulse_alpha");
  sized(impulse_kappa.size(), "impulse_kappa");
  sized(impulse_memory.size(), "impulse_memory");
  sized(l_mi_star.size(), "l_mi_star");
  sized(L_i.size(), "L_i");
  kernel_problems(p, g1, "g1");
  kernel_problems(p, g2, "g2");
  kernel_problems(p, g3, "g3");
  for (std::size_t i = 0; i < impulse_memory.size(); ++i) {
    kernel_problems(p, impulse_memory[i], "impulse memory kernel " + std::to_string(i + 1));
  }
  for (std::size_t i = 0; i < impulse_alpha.size(); ++i) {
    const double k = i < impulse_kappa.size() ? impulse_kappa[i] : 0.0;
    if (impulse_alpha[i] != 0.0 && !(k > 0.0)) {
      p.push_back("impulse kernel " + std::to_string(i + 1) + " decay rate must be > 0");
    }
  }
  if (!(delay_scale >= 0.0)) p.push_back("delay_scale must be >= 0");
  if (!(tail_rate > 0.0)) p.push_back("tail_rate must be > 0");
  if (!(tail_cutoff > 0.0)) p.push_back("tail_cutoff must be > 0");
  if (tail_points < 2) p.push_back("tail_points must be >= 2");
  if (nonlocal_time > a) p.push_back("nonlocal_time must not exceed a");
  for (double nu : q_eigenvalues) {
    if (!(nu >= 0.0)) {
      p.push_back("Q eigenvalues must be >= 0");
      break;
    }
  }
  for (const auto& m : marks) {
    if (!(m.intensity >= 0.0)) {
      p.push_back("mark intensities must be >= 0");
      break;
    }
  }
  if (!(jump_rate_scale >= 0.0)) p.push_back("jump_rate_scale must be >= 0");
  for (double v : {l1_star, l2_star, l_b_star, mho, chi_L2}) {
    if (!(v >= 0.0)) {
      p.push_back("declared noncompactness constants must be >= 0");
      break;
    }
  }
  return p;
}

void HeatExampleConfig::validate() const {
  auto p = problems();
  if (!p.empty()) throw ValidationError(std::move(p));
}

HeatExampleConfig HeatExampleConfig::scaled(double factor) const {
  HeatExampleConfig out = *this;
  out.g1.c *= factor;
  out.g2.c *= factor;
  out.g3.c *= factor;
  for (double& v : out.impulse_alpha) v *= factor;
  for (auto& k : out.impulse_memory) k.c *= factor;
  out.nonlocal_eps1 *= factor;
  out.nonlocal_eps2 *= factor;
  return out;
}

HeatExampleConfig default_heat_config() {
  HeatExampleConfig cfg;
  cfg.g1 = {0.02, 2.0, KernelWeight::Sine, KernelShape::Tanh};
  cfg.g2 = {0.2, 2.0, KernelWeight::Sine, KernelShape::Tanh};
  cfg.g3 = {0.2, 2.0, KernelWeight::Sine, KernelShape::Tanh};
  cfg.impulse_alpha = {0.3, 0.3};
  cfg.impulse_kappa = {2.0, 2.0};
  const SeparableKernel m{0.02, 2.0, KernelWeight::Sine, KernelShape::Sine};
  cfg.impulse_memory = {m, m};
  cfg.nonlocal_eps1 = 0.01;
  cfg.nonlocal_eps2 = 0.01;
  cfg.delay_scale = 0.05;
  cfg.psi_shape = Profile::Sine;
  cfg.psi_amp = 1.0;
  cfg.xi1_shape = Profile::Sine;
  cfg.xi1_amp = 0.5;
  cfg.q_eigenvalues = {0.25};
  cfg.marks = {{1.0, 1.0}, {0.5, 1.0}};
  cfg.l1_star = cfg.l2_star = cfg.l_b_star = cfg.mho = cfg.chi_L2 = 0.01;
  cfg.l_mi_star = {0.01, 0.01};
  cfg.L_i = {0.01, 0.01};
  return cfg;
}

ProblemSpec build_spec(const HeatExampleConfig& cfg) {
  auto check_kernel = [](const SeparableKernel& k, const char* name) {
    if (k.c != 0.0 && !(k.kappa > 0.0)) {
      throw ConfigError(std::string(name) + ": kappa <= 0 makes the prehistory integral diverge");
    }
  };
  check_kernel(cfg.g1, "g1");
  check_kernel(cfg.g2, "g2");
  check_kernel(cfg.g3, "g3");
  for (const auto& k : cfg.impulse_memory) check_kernel(k, "impulse memory kernel");
  cfg.validate();

  const std::size_t n = cfg.n_modes;
  ProblemSpec spec;
  spec.q = cfg.q;
  spec.op = OperatorSpec::dirichlet_laplacian(n);
  const SpectralField psi = profile_field(cfg.psi_shape, cfg.psi_amp, n);
  spec.psi = [psi](double) { return psi; };
  spec.xi1 = profile_field(cfg.xi1_shape, cfg.xi1_amp, n);

  auto basis = std::make_shared<const SineBasis>(n);
  if (cfg.g1.c != 0.0) {
    spec.coef.b = [t = MemoryTerm(cfg.g1, basis, psi)](double, const HistoryView& v) { return t(v); };
  }
  if (cfg.g2.c != 0.0) {
    spec.coef.f = [t = MemoryTerm(cfg.g2, basis, psi)](double, double mark, const HistoryView& v) {
      return mark * t(v);
    };
  }
  const std::size_t n_noise = cfg.q_eigenvalues.size();
  if (cfg.g3.c != 0.0 && n_noise > 0) {
    spec.coef.h = [t = MemoryTerm(cfg.g3, basis, psi), n_noise](double, const HistoryView& v) {
      return NoiseOperator::diagonal(t(v), n_noise);
    };
  }
  if (cfg.prehistory_noise != 0.0) {
    SpectralField k(n);
    k[0] = cfg.prehistory_noise;
    spec.coef.k_fn = [k](double) { return k; };
  }
  const double t_star = cfg.nonlocal_time < 0.0 ? cfg.a : cfg.nonlocal_time;
  auto nonlocal = [t_star, n](double eps) {
    return [t_star, n, eps](const HistoryPath& path) {
      SpectralField out(n);
      out[0] = eps * (pi / 2.0) * path.value_at(t_star)[0];
      return out;
    };
  };
  if (cfg.nonlocal_eps1 != 0.0) spec.coef.k1 = nonlocal(cfg.nonlocal_eps1);
  if (cfg.nonlocal_eps2 != 0.0) spec.coef.k2 = nonlocal(cfg.nonlocal_eps2);

  spec.schedule.r = cfg.r;
  spec.schedule.s = cfg.s;
  spec.schedule.a = cfg.a;
  for (std::size_t i = 0; i < cfg.n_impulses(); ++i) {
    ImpulseMaps maps;
    const double alpha = i < cfg.impulse_alpha.size() ? cfg.impulse_alpha[i] : 0.0;
    if (alpha != 0.0) {
      const double kappa = cfg.impulse_kappa[i];
      std::vector<double> psi_c(psi.coeffs().begin(), psi.coeffs().end());
      maps.l = [alpha, kappa, psi_c](const HistoryView& v) {
        auto id = [](const SpectralField& f, std::span<double> out) {
          std::copy(f.coeffs().begin(), f.coeffs().end(), out.begin());
        };
        SpectralField out(exp_memory(v, kappa, psi_c, id));
        out *= alpha;
        return out;
      };
    }
    if (i < cfg.impulse_memory.size() && cfg.impulse_memory[i].c != 0.0) {
      maps.m = [t = MemoryTerm(cfg.impulse_memory[i], basis, psi)](double, const HistoryView& v) { return t(v); };
    }
    spec.schedule.maps.push_back(std::move(maps));
  }

  if (cfg.delay_scale > 0.0) {
    const double d = cfg.delay_scale;
    spec.delay.sigma1 = [d](double) { return d; };
    spec.delay.sigma2 = [](double x) { return 1.0 / (1.0 + x); };
  }

  spec.noise.q_eigenvalues = cfg.q_eigenvalues;
  spec.noise.marks = cfg.marks;
  spec.noise.jump_rate_scale = cfg.jump_rate_scale;
  spec.noise.rng_seed = cfg.seed;

  spec.phase = PhaseNormConfig::exponential(cfg.tail_rate, cfg.tail_cutoff, cfg.tail_points);
  const HistoryPath pre(spec.psi, n);
  fill_phase_constants(spec.phase, pre, cfg.a, -cfg.delay_scale);
  spec.validate();
  return spec;
}

TimeGrid heat_grid(const HeatExampleConfig& cfg, double dt) {
  std::vector<double> bp;
  for (std::size_t i = 0; i < cfg.r.size(); ++i) {
    bp.push_back(cfg.r[i]);
    if (i < cfg.s.size()) bp.push_back(cfg.s[i]);
  }
  return TimeGrid::with_breakpoints(cfg.a, dt, bp);
}

HypothesisConstants suggested_constants(const HeatExampleConfig& cfg, double dt) {
  const ProblemSpec spec = build_spec(cfg);
  const double w = cfg.tail_rate;
  HypothesisConstants c;
  const TimeGrid grid = heat_grid(cfg, dt);
  c.M = empirical_resolvent_bound(cfg.q, spec.op, grid.nodes()).M();
  c.N1 = spec.phase.N1;
  c.N2_star = spec.phase.N2_star;
  c.N3_star = spec.phase.N3_star;
  c.J_star = spec.phase.J_star;
  c.L_k1 = std::pow(cfg.nonlocal_eps1 * pi / 2.0, 2);
  c.L_k2 = std::pow(cfg.nonlocal_eps2 * pi / 2.0, 2);
  c.l1_star = cfg.l1_star;
  c.l2_star = cfg.l2_star;

  auto growth_bound = [](const Growth& g) { return std::max(g.constant, g.linear); };
  c.M_b = growth_bound(growth_of(cfg.g1, w, "g1"));
  c.l_b_star = cfg.l_b_star;

  const std::size_t N = cfg.n_impulses();
  c.n_impulses = N;
  for (std::size_t i = 0; i < N; ++i) {
    const SeparableKernel k = i < cfg.impulse_memory.size() ? cfg.impulse_memory[i] : SeparableKernel{};
    c.M_i.push_back(growth_bound(growth_of(k, w, "impulse memory kernel")));
    const double alpha = i < cfg.impulse_alpha.size() ? cfg.impulse_alpha[i] : 0.0;
    if (alpha == 0.0) {
      c.lambda_i.push_back(0.0);
    } else {
      const double kappa = cfg.impulse_kappa[i];
      if (!(2.0 * kappa > w)) throw UnsupportedKernel("impulse kernel needs 2 kappa_i > tail rate");
      c.lambda_i.push_back(alpha * alpha / (2.0 * kappa - w));
    }
    c.l_mi_star.push_back(i < cfg.l_mi_star.size() ? cfg.l_mi_star[i] : 0.0);
    c.L_i.push_back(i < cfg.L_i.size() ? cfg.L_i[i] : 0.0);
  }

  c.trace_Q = spec.noise.trace_Q();
  c.lambda_h = c.trace_Q * growth_of(cfg.g3, w, "g3").linear;
  c.M_h = cfg.prehistory_noise * cfg.prehistory_noise;
  c.sup_m = cfg.a;  // m(t) = t
  double sup_n = 0.0;
  for (const auto& m : cfg.marks) sup_n += m.value * m.value * m.intensity;
  c.sup_n = sup_n * cfg.jump_rate_scale;
  c.lambda_f = growth_of(cfg.g2, w, "g2").linear;
  c.mho = cfg.mho;
  c.chi_L2 = cfg.chi_L2;
  c.a = cfg.a;
  const HistoryPath pre(spec.psi, spec.n_modes());
  c.psi_norm = phase_norm(HistoryView::of_prehistory(pre, 0.0), spec.phase);
  c.xi1_sq = std::pow(field_norm(spec.xi1), 2);
  return c;
}

}  // namespace fracsee
