#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sitesel/errors.hpp"
#include "sitesel/statistics.hpp"

using namespace sitesel;

TEST_CASE("arcsine statistics") {
  const auto st = compute_stats(CouplingDensity::arcsine());
  CHECK(std::abs(st.mean_coupling - 0.5) < 1e-9);
  CHECK(std::abs(st.fractional_spread - 1.0 / std::sqrt(2.0)) < 1e-9);
  CHECK(st.retained_fraction == doctest::Approx(1.0));
  CHECK(st.mean_error == 0.0);
}

TEST_CASE("ensemble statistics by hand") {
  CavityGeometry g;
  AtomEnsemble ens;
  ens.loaded = 4;
  // eta = 1, 1/2, 0 and a removed atom.
  const double q = g.probe_wavelength / 8.0;
  ens.atoms = {{0.0, 0.0, Spin::up}, {q, 0.0, Spin::up}, {2 * q, 0.0, Spin::down},
               {0.0, 0.0, Spin::removed}};
  const auto st = compute_stats(ens, g, 1, 100);
  CHECK(st.n_retained == 3);
  CHECK(st.retained_fraction == doctest::Approx(0.75));
  CHECK(st.mean_coupling == doctest::Approx(0.5));
  CHECK(st.fractional_spread == doctest::Approx(std::sqrt(1.0 / 6.0) / 0.5).epsilon(1e-9));
  CHECK(st.fraction_error == doctest::Approx(std::sqrt(0.75 * 0.25 / 4.0)));
  CHECK(st.mean_error > 0.0);

  AtomEnsemble empty;
  empty.loaded = 3;
  empty.atoms = {{0.0, 0.0, Spin::removed}};
  CHECK_THROWS_AS(compute_stats(empty, g), EmptyEnsemble);
}

TEST_CASE("bootstrap is deterministic") {
  const CavityGeometry g;
  SampleOptions o;
  o.atoms = 300;
  const auto ens = sample_ensemble(o, g);
  const auto a = compute_stats(ens, g, 9, 64);
  const auto b = compute_stats(ens, g, 9, 64);
  CHECK(a.mean_error == b.mean_error);
  CHECK(a.spread_error == b.spread_error);
  // Standard error of the mean of an arcsine sample: sqrt(1/8 / n).
  CHECK(a.mean_error == doctest::Approx(std::sqrt(0.125 / 300.0)).epsilon(0.3));
}

TEST_CASE("power-law fit") {
  std::vector<double> x, y;
  for (double v : log_grid(1e-4, 1.0, 30)) {
    x.push_back(v);
    y.push_back(2.5 * std::pow(v, 1.5));
  }
  const auto f = fit_power_law(x, y, {1e-3, 0.1});
  CHECK(f.prefactor == doctest::Approx(2.5).epsilon(1e-10));
  CHECK(f.exponent == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(f.residual_norm < 1e-10);

  std::vector<double> noisy = y;
  for (std::size_t i = 0; i < noisy.size(); ++i) noisy[i] *= 1.0 + 0.05 * std::sin(3.0 * i);
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] >= 1e-3 && x[i] <= 0.1) {
      xs.push_back(x[i]);
      ys.push_back(noisy[i]);
    }
  const auto ref = oracle::loglog_fit(xs, ys);
  const auto g = fit_power_law(x, noisy, {1e-3, 0.1});
  CHECK(g.prefactor == doctest::Approx(ref.first).epsilon(1e-10));
  CHECK(g.exponent == doctest::Approx(ref.second).epsilon(1e-10));
  CHECK(g.points == xs.size());

  std::vector<double> w(x.size(), 2.0);
  CHECK(fit_power_law(x, noisy, {1e-3, 0.1}, w).exponent == doctest::Approx(g.exponent));

  CHECK_THROWS_AS(fit_power_law(x, y, {0.5, 0.6}), FitError);
  std::vector<double> bad = y;
  bad[15] = -1.0;
  CHECK_THROWS_AS(fit_power_law(x, bad, {1e-3, 0.1}), FitError);
}

TEST_CASE("log grid") {
  const auto g = log_grid(1e-3, 1.0, 4);
  REQUIRE(g.size() == 4);
  CHECK(g.front() == doctest::Approx(1e-3));
  CHECK(g[1] == doctest::Approx(1e-2));
  CHECK(g.back() == doctest::Approx(1.0));
  CHECK_THROWS_AS(log_grid(0.0, 1.0, 4), InvalidArgument);
}

TEST_CASE("trade-off curve") {
  SelectionSequence seq;
  seq.pulses = {PulseSpec{1.0, 0.0, 1.0}};
  const auto grid = log_grid(1e-3, 0.5, 12);
  const auto pts = tradeoff_curve(seq, grid, 0.0);
  REQUIRE(pts.size() == grid.size());
  for (std::size_t i = 1; i < pts.size(); ++i) {
    CHECK(pts[i].retained_fraction > pts[i - 1].retained_fraction);
    CHECK(pts[i].mean_coupling < pts[i - 1].mean_coupling);
  }
  // Centred between node and antinode, the window keeps eta-bar at 1/2.
  for (const auto& p : tradeoff_curve(seq, grid, 0.5)) CHECK(p.mean_coupling == doctest::Approx(0.5).epsilon(1e-6));
  CHECK_THROWS_AS(tradeoff_curve(seq, {}, 0.0), InvalidArgument);
}
