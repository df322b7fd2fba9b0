#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sitesel/errors.hpp"
#include "sitesel/selection.hpp"
#include "sitesel/spectroscopy.hpp"
#include "sitesel/statistics.hpp"

using namespace sitesel;

TEST_CASE("window area") {
  auto f = [](double t) {
    const double g2 = 1.0 + t * t;
    const double s = std::sin(0.5 * pi * std::sqrt(g2));
    return s * s / g2;
  };
  // Tail beyond |t| = L contributes 1/L on average.
  // Unit intervals keep the adaptive rule from aliasing on the oscillation.
  const int L = 4000;
  double half = 0.0;
  for (int a = 0; a < L; ++a) half += oracle::simpson(f, a, a + 1.0, 1e-14);
  const double area = 2.0 * half + 1.0 / L;
  CHECK(window_area(1.0, 1.0) == doctest::Approx(area).epsilon(1e-5));
  CHECK(window_area(0.01, 1.0) == doctest::Approx(0.01 * area).epsilon(1e-5).scale(0.0));
  CHECK(area == doctest::Approx(2.117).epsilon(1e-3));
  CHECK_THROWS_AS(window_area(0.0, 1.0), InvalidArgument);
}

TEST_CASE("single-site spectrum") {
  const double eta0 = 0.8;
  const double stark = 1.0, rabi = 0.01, atoms = 100.0, dw0 = 2.0;
  const std::vector<double> det = {0.0, 0.2, 0.2 + rabi, 0.5};
  const auto s = synthesize_spectrum(CouplingDensity::point_masses({eta0}, {1.0}), rabi, stark, det,
                                     atoms, dw0);
  CHECK_NOTHROW(s.validate());
  CHECK(s.cavity_shift[1] == doctest::Approx(atoms * dw0 * eta0));
  CHECK(s.cavity_shift[2] ==
        doctest::Approx(atoms * dw0 * eta0 * oracle::rk4_flip(rabi, rabi)).epsilon(1e-6));
  CHECK(s.cavity_shift[3] < 1e-3 * s.cavity_shift[1]);
  CHECK_THROWS_AS(synthesize_spectrum(CouplingDensity::arcsine(), 0.0, 1.0, det, 1.0, 1.0),
                  InvalidArgument);
}

TEST_CASE("spectrum validation") {
  Spectrum s;
  s.detuning = {0.0, 1.0};
  s.cavity_shift = {0.0};
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
  s.cavity_shift = {0.0, -1.0};
  s.atom_count = 1.0;
  s.single_atom_shift = 1.0;
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
}

TEST_CASE("detuning grid") {
  const auto g = detuning_grid(2.0, 5, 0.0, 1.0);
  REQUIRE(g.size() == 5);
  CHECK(g.front() == 0.0);
  CHECK(g[2] == doctest::Approx(1.0));
  CHECK(g.back() == doctest::Approx(2.0));
}

TEST_CASE("narrow window reproduces eta P(eta)") {
  const double stark = 1.0, rabi = 1e-3;
  std::vector<double> det;
  for (double eta = 0.1; eta <= 0.9001; eta += 0.05) det.push_back(1.0 - eta);
  const auto s = synthesize_spectrum(CouplingDensity::arcsine(), rabi, stark, det, 1.0, 1.0);
  const double w = window_area(rabi, stark);
  for (std::size_t i = 0; i < det.size(); ++i) {
    const double eta = 1.0 - det[i];
    const double expect = eta / (pi * std::sqrt(eta * (1.0 - eta)));
    CHECK(s.cavity_shift[i] / w == doctest::Approx(expect).epsilon(0.02));
  }
}

TEST_CASE("inversion of a narrow spectrum") {
  const double stark = 1.0, rabi = 2e-3;
  const auto truth = CouplingDensity::arcsine();
  const auto grid = detuning_grid(stark, 601, -0.2, 1.2);
  const auto s = synthesize_spectrum(truth, rabi, stark, grid, 1000.0, 1.0);
  const auto d = invert_spectrum(s, 0.4, 0.9);
  CHECK(d.area() == doctest::Approx(1.0));
  CHECK(d.eta.front() > 0.4);
  CHECK(d.eta.back() <= 0.9 + 1e-12);
  CHECK(inversion_l1_error(d, truth) < 0.02);

  // Reference mean of the arcsine law restricted to (0.4, 0.9].
  const double m0 = oracle::arcsine_cdf(0.9) - oracle::arcsine_cdf(0.4);
  const double m1 = oracle::simpson([](double e) { return e / (pi * std::sqrt(e * (1 - e))); },
                                    0.4, 0.9, 1e-12);
  CHECK(d.mean() == doctest::Approx(m1 / m0).epsilon(5e-3));

  Spectrum empty = s;
  for (double& v : empty.cavity_shift) v = 0.0;
  CHECK_THROWS_AS(invert_spectrum(empty), InversionError);
  CHECK_THROWS_AS(invert_spectrum(s, 0.95, 0.5), InvalidArgument);
}

TEST_CASE("fluorescence slope ratio") {
  const CavityGeometry g;
  SampleOptions o;
  o.atoms = 20000;
  const auto all = sample_ensemble(o, g);
  SelectionSequence seq;
  seq.pulses = {PulseSpec{}};
  const auto kept = run_sequence(all, seq, g, 4);

  FluorescenceOptions fo;
  fo.relative_noise = 0.0;
  const auto r = simulate_fluorescence_slopes(kept, all, g, fo);
  REQUIRE(r.selected.size() == fo.atom_count_grid.size());
  const auto st = compute_stats(kept, g, 1, 20);
  const auto su = compute_stats(all, g, 1, 20);
  CHECK(r.mean_coupling_estimate ==
        doctest::Approx(st.mean_coupling * 0.5 / su.mean_coupling).epsilon(0.01));

  fo.relative_noise = 0.01;
  fo.seed = 3;
  const auto a = simulate_fluorescence_slopes(kept, all, g, fo);
  const auto b = simulate_fluorescence_slopes(kept, all, g, fo);
  CHECK(a.mean_coupling_estimate == b.mean_coupling_estimate);

  fo.atom_count_grid = {1.0};
  CHECK_THROWS_AS(simulate_fluorescence_slopes(kept, all, g, fo), FitError);
}
