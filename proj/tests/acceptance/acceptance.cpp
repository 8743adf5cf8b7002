// Acceptance checks: one PASS/FAIL line per criterion, exit code 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "fracsee/dynamics.hpp"
#include "fracsee/errors.hpp"
#include "fracsee/existence.hpp"
#include "fracsee/heat_example.hpp"
#include "fracsee/mlf.hpp"
#include "fracsee/noise.hpp"
#include "fracsee/phase_space.hpp"
#include "support/fixtures.hpp"
#include "support/talbot.hpp"

using namespace fracsee;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Moments {
  double n = 0, sum = 0, sq = 0;
  void add(double x) {
    n += 1;
    sum += x;
    sq += x * x;
  }
  double mean() const { return sum / n; }
  double se() const { return std::sqrt((sq / n - mean() * mean()) * n / (n - 1) / n); }
};

Outcome ml_collapse() {
  double e_exp = 0.0, e_cos = 0.0;
  for (int i = 0; i <= 200; ++i) {
    const double z = -5.0 + 0.05 * i;
    e_exp = std::max(e_exp, std::abs(mlf::ml_eval({1.0, 1.0}, z) - std::exp(z)));
    e_cos = std::max(e_cos, std::abs(mlf::ml_eval({2.0, 1.0}, -z * z) - std::cos(z)));
  }
  return {e_exp <= 1e-10 && e_cos <= 1e-10,
          fmt("201 points, max |E_{1,1}-exp| = %.2e, max |E_{2,1}(-z^2)-cos| = %.2e (tol 1e-10)", e_exp, e_cos)};
}

Outcome laplace_pair() {
  double worst = 0.0, sup_T = 0.0;
  int combos = 0;
  for (double q : {1.25, 1.5, 1.9}) {
    for (double mu : {1.0, 4.0, 25.0}) {
      for (double t : {0.5, 1.0, 2.0}) {
        ++combos;
        const double T = mlf::relaxation_T(q, mu, t);
        worst = std::max(worst, std::abs(T - testing::talbot_T(q, mu, t)));
        worst = std::max(worst, std::abs(mlf::relaxation_S(q, mu, t) - testing::talbot_S(q, mu, t)));
        sup_T = std::max(sup_T, std::abs(T));
      }
    }
  }
  return {worst <= 1e-6 && sup_T <= 1.0,
          fmt("%d (q, mu, t) combinations, max |error| over T and S = %.2e (tol 1e-6), sup |T| = %.4f", combos,
              worst, sup_T)};
}

Outcome deterministic_collapse() {
  const SpectralField x0{1.0, -0.5, 0.25}, xi1{0.5, 0.2, -0.1};
  double worst = 0.0, min_order = 1e300;
  for (double q : {1.25, 1.5, 1.9}) {
    ProblemSpec spec;
    spec.q = q;
    spec.op = OperatorSpec::dirichlet_laplacian(3);
    spec.schedule.a = 1.0;
    spec.psi = [x0](double) { return x0; };
    spec.xi1 = xi1;
    std::vector<double> residual;
    for (double dt : {1.0 / 128, 1.0 / 256}) {
      const TimeGrid grid = TimeGrid::uniform(1.0, dt);
      const auto res = picard_solve(spec, grid, NoiseRealization::none(grid, spec.noise));
      double r = 0.0;
      for (std::size_t n = 0; n < 3; ++n) {
        const double mu = spec.op.eigenvalues[n];
        std::vector<double> x, rhs;
        for (std::size_t k = 0; k < grid.size(); ++k) {
          const double t = grid[k];
          const double exact = mlf::relaxation_T(q, mu, t) * x0[n] + mlf::relaxation_S(q, mu, t) * xi1[n];
          worst = std::max(worst, std::abs(res.path.left(k)[n] - exact));
          x.push_back(res.path.left(k)[n]);
          rhs.push_back(-mu * x.back());
        }
        // measured away from the initial layer where x'' ~ t^{q-2}
        r = std::max(r, mlf::caputo_residual(x, q, rhs, grid, xi1[n], 0.1));
      }
      residual.push_back(r);
    }
    min_order = std::min(min_order, std::log2(residual[0] / residual[1]));
  }
  return {worst <= 1e-6 && min_order >= 0.5,
          fmt("q in {1.25, 1.5, 1.9}, 3 modes: max node error %.2e (tol 1e-6); Caputo residual order under "
              "2x refinement >= %.2f (need 0.5)",
              worst, min_order)};
}

Outcome ito_isometry() {
  const double a = 1.0;
  const TimeGrid grid = TimeGrid::uniform(a, 1.0 / 256);
  const int paths = 10000;
  struct Case {
    const char* name;
    std::vector<double> nu;
    std::function<NoiseOperator(double)> h;
    double exact;
  };
  const std::vector<Case> cases{
      {"h = 1", {1.0},
       [](double) {
         NoiseOperator h(1, 1);
         h(0, 0) = 1.0;
         return h;
       },
       a},
      {"h = t", {1.0},
       [](double t) {
         NoiseOperator h(1, 1);
         h(0, 0) = t;
         return h;
       },
       a * a * a / 3.0},
      {"two modes", {1.0, 0.5},
       [](double t) {
         NoiseOperator h(2, 2);
         h(0, 0) = std::cos(t);
         h(1, 1) = 2.0;
         h(0, 1) = 1.0;
         return h;
       },
       (a / 2.0 + std::sin(2.0 * a) / 4.0) + 0.5 * (4.0 + 1.0) * a},
  };
  bool ok = true;
  std::string detail;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const auto& cs = cases[c];
    NoiseConfig cfg;
    cfg.q_eigenvalues = cs.nu;
    cfg.rng_seed = 1000 + c;
    std::vector<TimedOperator> integrand;
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) integrand.push_back({grid[k], cs.h(grid[k])});
    Moments m;
    for (int p = 0; p < paths; ++p) {
      cfg.stream_id = static_cast<std::uint64_t>(p);
      const auto dw = sample_wiener(grid, cfg);
      m.add(std::pow(field_norm(ito_integral(integrand, dw, grid)), 2));
    }
    const double z = (m.mean() - cs.exact) / m.se();
    ok = ok && std::abs(z) <= 3.0;
    detail += fmt("%s%s: %.4f vs %.4f (%.2f SE)", c ? "; " : "", cs.name, m.mean(), cs.exact, z);
  }
  return {ok, fmt("%d paths; ", paths) + detail};
}

Outcome compensated_poisson() {
  const TimeGrid grid = TimeGrid::uniform(1.0, 1.0 / 64);
  NoiseConfig cfg;
  cfg.marks = {{1.0, 1.0}, {2.0, 1.0}};
  cfg.rng_seed = 77;
  const int reps = 10000;
  struct Case {
    const char* name;
    JumpIntegrand f;
  };
  const std::vector<Case> cases{
      {"f = mark", [](double, double th) { return SpectralField{th}; }},
      {"f = 3", [](double, double) { return SpectralField{3.0}; }},
      {"f = mark cos t", [](double t, double th) { return SpectralField{th * std::cos(t)}; }},
  };
  std::vector<Moments> m(cases.size());
  for (int r = 0; r < reps; ++r) {
    cfg.stream_id = static_cast<std::uint64_t>(r);
    const auto ev = sample_poisson(grid, cfg);
    for (std::size_t c = 0; c < cases.size(); ++c) {
      m[c].add(compensated_poisson_integral(cases[c].f, ev, cfg, grid, 1)[0]);
    }
  }
  bool ok = true;
  std::string detail = fmt("%d realizations; ", reps);
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const double z = m[c].mean() / m[c].se();
    ok = ok && std::abs(z) <= 3.0;
    detail += fmt("%s%s: mean %.4f (%.2f SE)", c ? "; " : "", cases[c].name, m[c].mean(), z);
  }
  return {ok, detail};
}

Outcome branch_continuity() {
  HeatExampleConfig cfg = default_heat_config();
  cfg.n_modes = 8;
  const ProblemSpec spec = build_spec(cfg);
  const TimeGrid grid = heat_grid(cfg, 1.0 / 64);
  const ResolventTable table(spec.q, spec.op, grid);
  const auto det = picard_solve(spec, grid, NoiseRealization::none(grid, spec.noise), table);
  double det_gap = 0.0;
  for (const auto& g : branch_continuity_check(det.path, spec)) det_gap = std::max(det_gap, g.gap);
  double sto_gap = 0.0;
  const int paths = 100;
  for (int p = 0; p < paths; ++p) {
    const auto res = picard_solve(spec, grid, NoiseRealization::sample(grid, spec.noise, p), table);
    for (const auto& g : branch_continuity_check(res.path, spec)) sto_gap = std::max(sto_gap, g.gap);
  }
  return {det_gap <= 1e-8 && sto_gap <= 1e-8,
          fmt("2 impulses: deterministic max gap %.2e, %d stochastic paths max gap %.2e (tol 1e-8)", det_gap, paths,
              sto_gap)};
}

Outcome existence_checker() {
  const auto fx = testing::load_fixture("existence_vectors.json");
  const auto toy = testing::constants_from_json(fx.at("toy").at("constants"));
  const auto rep = check_existence(toy);
  const double toy_err =
      std::max(std::abs(rep.delta1 - fx.at("toy").at("delta1").get<double>()),
               std::abs(rep.delta2 - fx.at("toy").at("delta2").get<double>()));
  double vec_err = 0.0;
  bool monotone = true;
  std::mt19937_64 gen(20240611);
  std::uniform_real_distribution<double> bump(0.0, 1.0);
  for (const auto& v : fx.at("random")) {
    const auto c = testing::constants_from_json(v.at("constants"));
    const auto r = check_existence(c);
    vec_err = std::max(vec_err, std::abs(r.delta1 - v.at("delta1").get<double>()) / std::max(1.0, r.delta1));
    vec_err = std::max(vec_err, std::abs(r.delta2 - v.at("delta2").get<double>()) / std::max(1.0, r.delta2));
    // raise every constant by an independent random amount
    HypothesisConstants up = c;
    for (double* x : {&up.M, &up.N1, &up.N2_star, &up.N3_star, &up.J_star, &up.L_k1, &up.L_k2, &up.l1_star,
                      &up.l2_star, &up.M_b, &up.l_b_star, &up.lambda_h, &up.M_h, &up.sup_m, &up.lambda_f,
                      &up.sup_n, &up.mho, &up.chi_L2, &up.trace_Q, &up.a}) {
      *x += bump(gen);
    }
    for (auto* arr : {&up.M_i, &up.l_mi_star, &up.lambda_i, &up.L_i}) {
      for (double& x : *arr) x += bump(gen);
    }
    const auto ru = check_existence(up);
    monotone = monotone && ru.delta1 >= r.delta1 && ru.delta2 >= r.delta2 && (r.satisfied || !ru.satisfied);
  }
  const auto ten = check_existence(scale_growth_constants(toy, 10.0));
  return {toy_err <= 1e-12 && vec_err <= 1e-12 && monotone && rep.satisfied && !ten.satisfied,
          fmt("toy delta1 = %.15g, delta2 = %.15g (err %.1e, tol 1e-12); 50 reference vectors max rel err %.1e; "
              "monotone on 50 perturbations: %s; x10 max = %.4g satisfied = %s",
              rep.delta1, rep.delta2, toy_err, vec_err, monotone ? "yes" : "no", ten.max,
              ten.satisfied ? "true" : "false")};
}

Outcome picard_behavior() {
  const HeatExampleConfig cfg = default_heat_config();
  const auto rep = check_existence(suggested_constants(cfg));
  const ProblemSpec spec = build_spec(cfg);
  const TimeGrid grid = heat_grid(cfg, 1.0 / 256);
  const ResolventTable table(spec.q, spec.op, grid);
  NoiseConfig nc = spec.noise;
  const auto noise = NoiseRealization::sample(grid, nc, 0);
  std::vector<double> d;
  bool converged = false;
  try {
    const auto res = picard_solve(spec, grid, noise, table, {1e-10, 20});
    d = res.distances;
    converged = true;
  } catch (const MaxIterations& e) {
    d = e.distances();
  }
  std::size_t decreasing = 1;
  for (std::size_t i = 1; i < d.size() && d[i] < d[i - 1]; ++i) ++decreasing;
  const bool monotone = decreasing == d.size() && d.size() >= 5;

  const HeatExampleConfig big = cfg.scaled(100.0);
  const auto big_rep = check_existence(suggested_constants(big));
  const ProblemSpec big_spec = build_spec(big);
  std::string big_outcome;
  bool big_ok = false;
  try {
    const auto r = picard_solve(big_spec, grid, NoiseRealization::sample(grid, big_spec.noise, 0), table, {1e-10, 20});
    big_ok = r.distances.back() < 1e-10;
    big_outcome = fmt("converged in %zu sweeps", r.sweeps);
  } catch (const MaxIterations& e) {
    big_ok = true;
    big_outcome = fmt("MaxIterations after %zu sweeps, last distance %.2e", e.distances().size(),
                      e.distances().empty() ? 0.0 : e.distances().back());
  }
  std::string trace;
  for (double x : d) trace += fmt("%s%.2e", trace.empty() ? "" : " ", x);
  return {rep.satisfied && converged && monotone && d.size() <= 20 && big_ok && !big_rep.satisfied,
          fmt("default config max delta = %.4f; dt = 1/256: %zu sweeps, distances [%s], tol 1e-10; x100 config max "
              "delta = %.4g, %s",
              rep.max, d.size(), trace.c_str(), big_rep.max, big_outcome.c_str())};
}

Outcome phase_space_bounds() {
  HeatExampleConfig heat = default_heat_config();
  const double a = heat.a;
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> w(0.5, 4.0);
  int ok = 0, checks = 0;
  const int paths = 100;
  for (int p = 0; p < paths; ++p) {
    const std::size_t n = 3;
    SpectralField base(n);
    for (std::size_t m = 0; m < n; ++m) base[m] = u(gen);
    const double freq = w(gen);
    HistoryPath path([base, freq](double s) { return std::cos(freq * s) * base; }, n);
    auto cfg = PhaseNormConfig::exponential(heat.tail_rate, heat.tail_cutoff, heat.tail_points);
    fill_phase_constants(cfg, path, a, -heat.delay_scale);
    // piecewise-linear samples with two jumps
    const int pieces = 32;
    for (int k = 0; k <= pieces; ++k) {
      SpectralField v(n);
      for (std::size_t m = 0; m < n; ++m) v[m] = 2.0 * u(gen);
      const double t = a * k / pieces;
      if (k == 8 || k == 20) {
        SpectralField right(n);
        for (std::size_t m = 0; m < n; ++m) right[m] = 2.0 * u(gen);
        path.append_jump(t, v, right);
      } else {
        path.append(t, v);
      }
    }
    for (int j = 0; j < 10; ++j) {
      const double tau = a * (j + 0.5) / 10.0;
      ++checks;
      if (lemma31_bound_check(path, cfg, tau).ok) ++ok;
    }
  }
  return {ok == checks, fmt("%d random piecewise paths, %d of %d segment bounds hold", paths, ok, checks)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*run)();
    double budget_s;
  };
  const Criterion criteria[] = {
      {"Mittag-Leffler collapse", ml_collapse, 1},
      {"Resolvent Laplace pair", laplace_pair, 10},
      {"Deterministic collapse", deterministic_collapse, 30},
      {"Ito isometry", ito_isometry, 60},
      {"Compensated Poisson", compensated_poisson, 30},
      {"Branch continuity", branch_continuity, 30},
      {"Existence checker", existence_checker, 1},
      {"Picard behavior", picard_behavior, 120},
      {"Phase-space bounds", phase_space_bounds, 10},
  };
  int failed = 0, index = 0;
  for (const auto& c : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::printf("%s [%d] %s: %s; %.2f s (budget %.0f s)\n", pass ? "PASS" : "FAIL", index, c.name, o.detail.c_str(),
                secs, c.budget_s);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
