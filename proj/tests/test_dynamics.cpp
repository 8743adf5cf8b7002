#include <doctest.h>

#include <cmath>
#include <vector>

#include "fracsee/dynamics.hpp"
#include "fracsee/errors.hpp"
#include "fracsee/mlf.hpp"

using namespace fracsee;

namespace {

ProblemSpec bare_spec(std::size_t n_modes, double q, SpectralField x0, SpectralField xi1) {
  ProblemSpec spec;
  spec.q = q;
  spec.op = OperatorSpec::dirichlet_laplacian(n_modes);
  spec.schedule.a = 1.0;
  spec.psi = [x0](double) { return x0; };
  spec.xi1 = std::move(xi1);
  spec.phase = PhaseNormConfig::exponential(2.0, 20.0, 401);
  return spec;
}

// two impulses with memory, a delayed neutral term and both noises; the lag
// is fixed because point lookups whose lag depends on the state can straddle
// the jumps at r_i and make the fixed-point map discontinuous
ProblemSpec impulsive_spec(bool stochastic) {
  ProblemSpec spec = bare_spec(3, 1.5, SpectralField{1.0, -0.5, 0.25}, SpectralField{0.2, 0.0, 0.1});
  spec.schedule.r = {0.25, 0.625};
  spec.schedule.s = {0.375, 0.75};
  for (int i = 0; i < 2; ++i) {
    ImpulseMaps maps;
    maps.l = [i](const HistoryView& v) { return (0.4 + 0.1 * i) * v(0.0) + 0.1 * v(-0.05); };
    maps.m = [](double t, const HistoryView& v) { return (0.05 * t) * v(0.0); };
    spec.schedule.maps.push_back(maps);
  }
  spec.coef.b = [](double, const HistoryView& v) { return 0.05 * v(-0.1); };
  spec.delay.sigma1 = [](double) { return 0.05; };
  if (stochastic) {
    spec.noise.q_eigenvalues = {0.5};
    spec.noise.marks = {{1.0, 1.0}, {0.5, 2.0}};
    spec.coef.f = [](double, double mark, const HistoryView& v) { return (0.1 * mark) * v(0.0); };
    spec.coef.h = [](double, const HistoryView& v) {
      SpectralField col = 0.1 * v(0.0);
      col[0] += 0.05;
      return NoiseOperator::diagonal(col, 1);
    };
    spec.coef.k_fn = [](double) { return SpectralField{0.01, 0.0, 0.0}; };
  }
  return spec;
}

TimeGrid grid_for(const ProblemSpec& spec, double dt) {
  return TimeGrid::with_breakpoints(spec.schedule.a, dt, spec.schedule.breakpoints());
}

}  // namespace

TEST_CASE("branch classification") {
  ImpulseSchedule sch;
  sch.r = {1.0};
  sch.s = {1.5};
  sch.a = 2.0;
  CHECK(classify_time(sch, 0.5).kind == BranchKind::Initial);
  CHECK(classify_time(sch, 1.0).kind == BranchKind::Initial);
  CHECK(classify_time(sch, 1.2) == Branch{BranchKind::Impulse, 1});
  CHECK(classify_time(sch, 1.5) == Branch{BranchKind::Impulse, 1});
  CHECK(classify_time(sch, 1.5 + 1e-9) == Branch{BranchKind::PostImpulse, 1});
  CHECK(classify_time(sch, 2.0).label() == "post:1");
  CHECK(classify_time(sch, 1.2).label() == "impulse:1");
  CHECK_THROWS_AS(classify_time(sch, 2.5), OutOfRange);
  CHECK_THROWS_AS(classify_time(sch, -0.1), OutOfRange);
}

TEST_CASE("schedule validation collects every problem") {
  ImpulseSchedule sch;
  sch.r = {0.0, 1.6};
  sch.s = {0.5, 1.5};
  sch.a = 2.0;
  try {
    sch.validate();
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.problems().size() >= 2);
  }
  ProblemSpec spec = bare_spec(1, 2.0, SpectralField{1.0}, SpectralField(2));
  try {
    spec.validate();
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.problems().size() == 2);
  }
}

TEST_CASE("mild formula collapses to the resolvent families") {
  ProblemSpec spec = bare_spec(1, 1.5, SpectralField{1.0}, SpectralField{0.5});
  const TimeGrid grid = TimeGrid::uniform(1.0, 1.0 / 16);
  HistoryPath path(spec.psi, 1);
  for (double t : grid.nodes()) path.append(t, SpectralField{0.0});
  const auto noise = NoiseRealization::none(grid, spec.noise);
  // E_{1.5,1}(-1) + 0.5 E_{1.5,2}(-1)
  CHECK(mild_eval(spec, grid, noise, path, grid.size() - 1)[0] ==
        doctest::Approx(0.39662936531808808449 + 0.5 * 0.73748224790189471418).epsilon(1e-13));

  ProblemSpec three = bare_spec(3, 1.25, SpectralField{1.0, 2.0, -1.0}, SpectralField(3));
  HistoryPath p3(three.psi, 3);
  for (double t : grid.nodes()) p3.append(t, SpectralField(3));
  const auto v = mild_eval(three, grid, noise, p3, 5);
  CHECK(field_norm(v - apply_Tq(grid[5], 1.25, SpectralField{1.0, 2.0, -1.0}, three.op)) < 1e-14);
}

TEST_CASE("impulse branch returns l_i + m_i") {
  ProblemSpec spec = bare_spec(2, 1.5, SpectralField{1.0, 0.0}, SpectralField(2));
  spec.schedule.r = {0.25};
  spec.schedule.s = {0.5};
  spec.schedule.maps = {{[](const HistoryView&) { return SpectralField{3.0, -1.0}; }, {}}};
  const TimeGrid grid = grid_for(spec, 1.0 / 16);
  const auto res = picard_solve(spec, grid, NoiseRealization::none(grid, spec.noise));
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (grid[k] > 0.25 && grid[k] <= 0.5) CHECK(res.path.left(k) == SpectralField{3.0, -1.0});
  }
  // the right limit at r_1 already carries the impulse
  const std::size_t r = grid.find(0.25);
  CHECK(res.path.is_jump(r));
  CHECK(res.path.right(r) == SpectralField{3.0, -1.0});
  CHECK(res.path.left(r)[0] == doctest::Approx(mlf::relaxation_T(1.5, 1.0, 0.25)));
}

TEST_CASE("delayed lookups beyond the path are flagged") {
  ProblemSpec spec = bare_spec(1, 1.5, SpectralField{1.0}, SpectralField{0.0});
  spec.coef.b = [](double, const HistoryView& v) { return 0.1 * v(0.0); };
  const TimeGrid grid = TimeGrid::uniform(1.0, 0.125);
  HistoryPath partial(spec.psi, 1);
  for (std::size_t k = 0; k < 4; ++k) partial.append(grid[k], SpectralField{1.0});
  const auto noise = NoiseRealization::none(grid, spec.noise);
  CHECK_NOTHROW(mild_eval(spec, grid, noise, partial, 3));
  CHECK_THROWS_AS(mild_eval(spec, grid, noise, partial, 4), UnresolvedDelay);
}

TEST_CASE("Picard iteration") {
  SUBCASE("explicit problem needs at most two sweeps") {
    ProblemSpec spec = bare_spec(3, 1.5, SpectralField{1.0, 0.5, 0.0}, SpectralField{0.0, 1.0, 0.0});
    const TimeGrid grid = TimeGrid::uniform(1.0, 1.0 / 32);
    const auto res = picard_solve(spec, grid, NoiseRealization::none(grid, spec.noise));
    CHECK(res.sweeps <= 2);
  }
  SUBCASE("a single sweep is not enough with a genuine delay") {
    ProblemSpec spec = impulsive_spec(false);
    const TimeGrid grid = grid_for(spec, 1.0 / 32);
    try {
      picard_solve(spec, grid, NoiseRealization::none(grid, spec.noise), {1e-10, 1});
      FAIL("expected MaxIterations");
    } catch (const MaxIterations& e) {
      CHECK(e.distances().size() == 1);
      CHECK(e.distances()[0] > 1e-10);
    }
  }
  SUBCASE("state-dependent lag on a continuous path") {
    ProblemSpec spec = bare_spec(2, 1.5, SpectralField{1.0, 0.5}, SpectralField{0.0, 0.3});
    spec.coef.b = [](double, const HistoryView& v) { return 0.1 * v(0.0); };
    spec.delay.sigma1 = [](double t) { return t / 2.0; };
    spec.delay.sigma2 = [](double x) { return 1.0 / (1.0 + x); };
    const TimeGrid grid = TimeGrid::uniform(1.0, 1.0 / 128);
    const auto res = picard_solve(spec, grid, NoiseRealization::none(grid, spec.noise));
    CHECK(res.sweeps >= 3);
    CHECK(res.distances.back() < 1e-10);
  }
  SUBCASE("contracting problem converges with decreasing distances") {
    ProblemSpec spec = impulsive_spec(true);
    const TimeGrid grid = grid_for(spec, 1.0 / 64);
    spec.noise.rng_seed = 4;
    const auto res = picard_solve(spec, grid, NoiseRealization::sample(grid, spec.noise));
    CHECK(res.distances.back() < 1e-10);
    for (std::size_t i = 1; i < res.distances.size(); ++i) CHECK(res.distances[i] < res.distances[i - 1]);
  }
}

TEST_CASE("branch continuity at the end of each impulse") {
  SUBCASE("trivial maps give exact zeros") {
    ProblemSpec spec = bare_spec(2, 1.5, SpectralField{1.0, 1.0}, SpectralField(2));
    spec.schedule.r = {0.25, 0.625};
    spec.schedule.s = {0.375, 0.75};
    const TimeGrid grid = grid_for(spec, 1.0 / 32);
    const auto res = picard_solve(spec, grid, NoiseRealization::none(grid, spec.noise));
    for (const auto& g : branch_continuity_check(res.path, spec)) CHECK(g.gap == 0.0);
  }
  SUBCASE("deterministic and stochastic paths") {
    for (bool stochastic : {false, true}) {
      ProblemSpec spec = impulsive_spec(stochastic);
      const TimeGrid grid = grid_for(spec, 1.0 / 32);
      const auto res = picard_solve(spec, grid, NoiseRealization::sample(grid, spec.noise, 2));
      const auto gaps = branch_continuity_check(res.path, spec);
      REQUIRE(gaps.size() == 2);
      for (const auto& g : gaps) CHECK(g.gap <= 1e-8);
      // the next node after s_i continues from the value at s_i
      for (double s : spec.schedule.s) {
        const std::size_t k = grid.find(s);
        CHECK(field_norm(res.path.left(k + 1) - res.path.left(k)) < 0.1);
      }
    }
  }
  SUBCASE("the literal restart reads a different segment") {
    ProblemSpec spec = impulsive_spec(false);
    spec.restart = RestartConvention::LiteralSegment;
    const TimeGrid grid = grid_for(spec, 1.0 / 32);
    const auto res = picard_solve(spec, grid, NoiseRealization::none(grid, spec.noise));
    for (const auto& g : branch_continuity_check(res.path, spec)) CHECK(g.gap > 1e-4);
  }
}

TEST_CASE("velocity restarts at zero after each impulse") {
  ProblemSpec spec = impulsive_spec(false);
  double prev = 1e300;
  for (double dt : {1.0 / 64, 1.0 / 256, 1.0 / 1024}) {
    const TimeGrid grid = grid_for(spec, dt);
    const auto res = picard_solve(spec, grid, NoiseRealization::none(grid, spec.noise));
    double worst = 0.0;
    for (double s : spec.schedule.s) {
      const std::size_t k = grid.find(s);
      // [xi - b]' around s_i + h from the values at s_i and s_i + 2h
      auto reduced = [&](std::size_t j) {
        const double t = grid[j];
        const double rho = eval_delay_norm(spec.delay, t, field_norm(res.path.left(j)));
        return res.path.left(j) - spec.coef.b(t, delayed_view(res.path, rho));
      };
      const double h = grid[k + 2] - grid[k];
      worst = std::max(worst, field_norm(reduced(k + 2) - reduced(k)) / h);
    }
    CHECK(worst < prev);
    prev = worst;
  }
  CHECK(prev < 0.1);
}

TEST_CASE("ensemble wrapper") {
  ProblemSpec spec = impulsive_spec(true);
  const TimeGrid grid = grid_for(spec, 1.0 / 32);
  EnsembleOptions one;
  one.base_seed = 12;
  one.keep_paths = true;
  const auto st = simulate_ensemble(spec, grid, one);
  NoiseConfig cfg = spec.noise;
  cfg.rng_seed = 12;
  const auto single = picard_solve(spec, grid, NoiseRealization::sample(grid, cfg, 0));
  for (std::size_t k = 0; k < grid.size(); ++k) CHECK(st.mean_field[k] == single.path.left(k));

  EnsembleOptions many;
  many.n_paths = 6;
  many.base_seed = 3;
  many.threads = 1;
  const auto serial = simulate_ensemble(spec, grid, many);
  many.threads = 3;
  const auto threaded = simulate_ensemble(spec, grid, many);
  CHECK(serial.mean_sq_norm == threaded.mean_sq_norm);
  CHECK(serial.var_sq_norm == threaded.var_sq_norm);
  CHECK(serial.jump_counts == threaded.jump_counts);
  CHECK(serial.var_sq_norm.back() > 0.0);

  ProblemSpec quiet = impulsive_spec(false);
  const auto q = simulate_ensemble(quiet, grid, many);
  for (double v : q.var_sq_norm) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("resolvent table on uneven grids") {
  const OperatorSpec op = OperatorSpec::dirichlet_laplacian(4);
  const std::vector<double> bp{0.3, 0.55};
  const TimeGrid grid = TimeGrid::with_breakpoints(1.0, 0.125, bp);
  const ResolventTable table(1.5, op, grid);
  std::vector<double> t(4), s(4);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    for (std::size_t j = 0; j <= k; ++j) {
      ResolventTable::evaluate(1.5, op, grid[k] - grid[j], t, s);
      for (std::size_t n = 0; n < 4; ++n) {
        CHECK(table.T(k, j)[n] == doctest::Approx(t[n]).epsilon(1e-12));
        CHECK(table.S(k, j)[n] == doctest::Approx(s[n]).epsilon(1e-12));
      }
    }
  }
}
