#include <doctest.h>

#include <cmath>
#include <vector>

#include "fracsee/errors.hpp"
#include "fracsee/noise.hpp"

using namespace fracsee;

TEST_CASE("counter generator streams") {
  CounterRng a(1, 0), b(1, 0), c(1, 1), d(2, 0);
  const auto x = a();
  CHECK(x == b());
  CHECK(x != c());
  CHECK(x != d());
  CHECK(a.counter() == 1);
}

TEST_CASE("wiener increments") {
  const TimeGrid grid = TimeGrid::uniform(1.0, 1.0 / 16);
  NoiseConfig cfg;
  cfg.q_eigenvalues = {0.0, 0.0};
  const auto zero = sample_wiener(grid, cfg);
  for (double v : zero.raw()) CHECK(v == 0.0);

  cfg.q_eigenvalues = {1.0, 0.25};
  cfg.rng_seed = 5;
  cfg.stream_id = 3;
  const auto w1 = sample_wiener(grid, cfg);
  const auto w2 = sample_wiener(grid, cfg);
  CHECK(std::vector<double>(w1.raw().begin(), w1.raw().end()) ==
        std::vector<double>(w2.raw().begin(), w2.raw().end()));
  cfg.stream_id = 4;
  CHECK(sample_wiener(grid, cfg)(0, 0) != w1(0, 0));

  // unit step, unit variance: 1e5 draws
  const TimeGrid unit = TimeGrid::uniform(100000.0, 1.0);
  NoiseConfig one;
  one.q_eigenvalues = {1.0};
  one.rng_seed = 9;
  const auto w = sample_wiener(unit, one);
  double sum = 0.0, sq = 0.0;
  for (double v : w.raw()) {
    sum += v;
    sq += v * v;
  }
  const double n = static_cast<double>(w.raw().size());
  const double var = sq / n - (sum / n) * (sum / n);
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("poisson events") {
  const TimeGrid grid = TimeGrid::uniform(1.0, 1.0 / 32);
  NoiseConfig cfg;
  CHECK(sample_poisson(grid, cfg).empty());
  cfg.marks = {{1.0, 0.0}};
  CHECK(sample_poisson(grid, cfg).empty());

  cfg.marks = {{0.5, 2.0}};
  double total = 0.0;
  const int reps = 10000;
  for (int r = 0; r < reps; ++r) {
    cfg.stream_id = static_cast<std::uint64_t>(r);
    const auto ev = sample_poisson(grid, cfg);
    total += static_cast<double>(ev.size());
    for (std::size_t k = 0; k < ev.size(); ++k) {
      CHECK(ev[k].mark == 0.5);
      CHECK(ev[k].time >= 0.0);
      CHECK(ev[k].time <= 1.0);
      if (k > 0) CHECK(ev[k].time >= ev[k - 1].time);
    }
  }
  CHECK(std::abs(total / reps - 2.0) < 3.0 * std::sqrt(2.0 / reps));
}

TEST_CASE("integrals") {
  const TimeGrid grid = TimeGrid::uniform(1.0, 0.25);
  NoiseConfig cfg;
  cfg.q_eigenvalues = {1.0};
  cfg.rng_seed = 1;
  const auto dw = sample_wiener(grid, cfg);

  std::vector<TimedOperator> zero, one, late;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    zero.push_back({grid[k], NoiseOperator(2, 1)});
    NoiseOperator h(2, 1);
    h(0, 0) = 1.0;
    one.push_back({grid[k], h});
    late.push_back({grid[k + 1], h});
  }
  CHECK(field_norm(ito_integral(zero, dw, grid)) == 0.0);
  double w = 0.0;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) w += dw(0, k);
  CHECK(ito_integral(one, dw, grid)[0] == doctest::Approx(w));
  CHECK_THROWS_AS(ito_integral(late, dw, grid), AdaptednessError);

  const auto constant_k = [](double) { return SpectralField{0.5, -1.0}; };
  const auto hw = history_wiener_integral(zero, constant_k, dw, grid, 4, 2);
  CHECK(hw == SpectralField{0.5, -1.0});
  const auto hw1 = history_wiener_integral(one, [](double) { return SpectralField(2); }, dw, grid, 2, 2);
  CHECK(hw1[0] == doctest::Approx(dw(0, 0) + dw(0, 1)));

  cfg.marks = {{1.0, 1.5}, {2.0, 0.5}};
  cfg.jump_rate_scale = 2.0;
  const std::vector<PoissonEvent> ev{{0.1, 0, 1.0}, {0.6, 1, 2.0}, {0.9, 0, 1.0}};
  const auto c = compensated_poisson_integral([](double, double) { return SpectralField{3.0}; }, ev, cfg, grid, 1);
  CHECK(c[0] == doctest::Approx(3.0 * (3.0 - 1.0 * 2.0 * 2.0)));
  const auto z = compensated_poisson_integral([](double, double) { return SpectralField{0.0}; }, ev, cfg, grid, 1);
  CHECK(z[0] == 0.0);
  // window (0.25, 0.75]: one event, compensator 0.5 * (1.5 + 0.5) * 2 * mark-weighted
  const auto part = compensated_poisson_integral([](double, double th) { return SpectralField{th}; }, ev, cfg, grid, 1, 1, 3);
  CHECK(part[0] == doctest::Approx(2.0 - 0.5 * 2.0 * (1.0 * 1.5 + 2.0 * 0.5)));
}

TEST_CASE("noise operators and configuration") {
  NoiseConfig cfg;
  cfg.q_eigenvalues = {1.0, 0.5};
  cfg.marks = {{1.0, 0.25}, {2.0, 0.75}};
  CHECK(cfg.trace_Q() == 1.5);
  CHECK(cfg.total_intensity() == 1.0);
  CHECK_NOTHROW(cfg.validate());
  cfg.q_eigenvalues = {-1.0};
  CHECK_THROWS_AS(cfg.validate(), DomainError);

  const auto h = NoiseOperator::diagonal(SpectralField{1.0, 2.0}, 2);
  const std::vector<double> nu{1.0, 0.5};
  CHECK(h.q_norm_sq(nu) == doctest::Approx(1.5 * 5.0));
  const auto md = NoiseOperator::mode_diagonal(SpectralField{3.0, 4.0});
  CHECK(md(0, 0) == 3.0);
  CHECK(md(1, 1) == 4.0);
  CHECK(md(0, 1) == 0.0);
}
