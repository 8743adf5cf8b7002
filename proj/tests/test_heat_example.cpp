#include <doctest.h>

#include <cmath>

#include "fracsee/errors.hpp"
#include "fracsee/heat_example.hpp"
#include "fracsee/mlf.hpp"

using namespace fracsee;

namespace {

HeatExampleConfig zero_kernels() {
  HeatExampleConfig cfg;
  cfg.n_modes = 4;
  cfg.psi_shape = Profile::Parabola;
  cfg.xi1_shape = Profile::Sine;
  cfg.xi1_amp = 0.5;
  return cfg;
}

}  // namespace

TEST_CASE("zero kernels give the pure fractional heat equation") {
  const auto cfg = zero_kernels();
  const ProblemSpec spec = build_spec(cfg);
  CHECK_FALSE(spec.coef.b);
  CHECK_FALSE(spec.coef.f);
  CHECK_FALSE(spec.coef.h);
  const TimeGrid grid = heat_grid(cfg, 1.0 / 64);
  HistoryPath probe(spec.psi, 4);
  for (double t : grid.nodes()) probe.append(t, SpectralField(4));
  for (std::size_t i = 0; i < 2; ++i) {
    if (spec.schedule.maps[i].l) CHECK(field_norm(spec.schedule.maps[i].l(segment(probe, 0.5))) == 0.0);
  }
  CHECK(eval_delay(spec.delay, 0.4, HistoryView::of_prehistory(probe)) == 0.4);

  HeatExampleConfig plain = cfg;
  plain.r.clear();
  plain.s.clear();
  const ProblemSpec ps = build_spec(plain);
  const TimeGrid g = heat_grid(plain, 1.0 / 64);
  const auto res = picard_solve(ps, g, NoiseRealization::none(g, ps.noise));
  const SpectralField x0 = ps.psi(0.0);
  for (std::size_t k = 0; k < g.size(); k += 8) {
    for (std::size_t n = 0; n < 4; ++n) {
      const double mu = (n + 1.0) * (n + 1.0);
      const double expect =
          mlf::relaxation_T(1.5, mu, g[k]) * x0[n] + mlf::relaxation_S(1.5, mu, g[k]) * ps.xi1[n];
      CHECK(std::abs(res.path.left(k)[n] - expect) < 1e-12);
    }
  }
  CHECK(x0[0] == doctest::Approx(3.19153824321146142).epsilon(1e-9));
}

TEST_CASE("impulse memory integrates the constant prehistory exactly") {
  HeatExampleConfig cfg = zero_kernels();
  cfg.psi_shape = Profile::Sine;
  cfg.psi_amp = 2.0;
  cfg.impulse_alpha = {1.0, 1.0};
  cfg.impulse_kappa = {1.0, 1.0};
  const ProblemSpec spec = build_spec(cfg);
  const HistoryPath path(spec.psi, cfg.n_modes);
  const SpectralField l = spec.schedule.maps[0].l(HistoryView::of_prehistory(path));
  CHECK(field_norm(l - spec.psi(0.0)) < 1e-12);

  // over recorded samples the trapezoid rule is second order
  double prev = 0.0;
  for (int n : {32, 64, 128}) {
    HistoryPath rec(spec.psi, cfg.n_modes);
    for (int k = 0; k <= n; ++k) rec.append(static_cast<double>(k) / n, spec.psi(0.0));
    const double err = field_norm(spec.schedule.maps[1].l(segment(rec, 0.625)) - spec.psi(0.0));
    CHECK(err < 1e-3);
    if (prev > 0.0) CHECK(std::log2(prev / err) == doctest::Approx(2.0).epsilon(0.05));
    prev = err;
  }
}

TEST_CASE("suggested constants") {
  const auto zc = suggested_constants(zero_kernels());
  CHECK(zc.M_b == 0.0);
  CHECK(zc.lambda_f == 0.0);
  CHECK(zc.lambda_h == 0.0);
  for (double v : zc.M_i) CHECK(v == 0.0);
  CHECK(zc.N1 == 1.0);
  CHECK(zc.N2_star == doctest::Approx(1.6575198539828996328).epsilon(1e-10));

  HeatExampleConfig cfg = zero_kernels();
  cfg.g1 = {0.1, 2.0, KernelWeight::One, KernelShape::Tanh};
  const double mb = suggested_constants(cfg).M_b;
  cfg.g1.c = 0.2;
  CHECK(std::sqrt(suggested_constants(cfg).M_b) == doctest::Approx(2.0 * std::sqrt(mb)));

  cfg.g2 = {0.1, 0.5, KernelWeight::Sine, KernelShape::Linear};
  CHECK_THROWS_AS(suggested_constants(cfg), UnsupportedKernel);
}

TEST_CASE("shipped configuration satisfies the existence condition") {
  const auto cfg = default_heat_config();
  const auto rep = check_existence(suggested_constants(cfg));
  CHECK(rep.satisfied);
  CHECK_FALSE(check_existence(suggested_constants(cfg.scaled(100.0))).satisfied);
}

TEST_CASE("configuration errors") {
  HeatExampleConfig cfg = zero_kernels();
  cfg.g1 = {0.1, -1.0, KernelWeight::One, KernelShape::Tanh};
  CHECK_THROWS_AS(build_spec(cfg), ConfigError);
  HeatExampleConfig bad = zero_kernels();
  bad.q = 2.0;
  bad.r = {0.5};
  bad.s = {0.4};
  try {
    bad.validate();
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.problems().size() >= 2);
  }
}
