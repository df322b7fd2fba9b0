#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sitesel/errors.hpp"
#include "sitesel/selection.hpp"
#include "sitesel/statistics.hpp"

using namespace sitesel;

TEST_CASE("window function agrees with the Schroedinger equation") {
  double worst = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double ratio = 0.05 + (2.0 - 0.05) * i / 7.0;
    for (int j = 0; j < 8; ++j) {
      const double gap = j / 7.0;
      const double f = transfer_probability(gap, 0.0, ratio, 1.0);
      worst = std::max(worst, std::abs(f - oracle::rk4_flip(ratio, gap)));
    }
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("window shape") {
  CHECK(transfer_probability(0.3, 0.3, 0.1, 1.0) == doctest::Approx(1.0));
  CHECK(transfer_probability(0.35, 0.3, 0.1, 1.0) ==
        doctest::Approx(transfer_probability(0.25, 0.3, 0.1, 1.0)));
  // First zero of a pi-pulse sits at a detuning of sqrt(3) Rabi frequencies.
  CHECK(rabi_flip_probability(1.0, std::sqrt(3.0)) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK_THROWS_AS(transfer_probability(0.0, 0.0, 0.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(transfer_probability(0.0, 0.0, 1.0, -1.0), InvalidArgument);
}

TEST_CASE("pulse spec") {
  PulseSpec p{2.0, 0.5, 10.0};
  CHECK(p.duration() == doctest::Approx(pi / 2.0));
  CHECK(p.resonant_fraction() == doctest::Approx(0.05));
  CHECK(p.window_width() == doctest::Approx(0.2));
  CHECK(pulse_flip_probability(p, 0.05) == doctest::Approx(1.0));
  p.rabi_frequency = -1.0;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  SelectionSequence s;
  s.pulses.push_back({});
  s.blow_away_survival = 1.5;
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
}

TEST_CASE("particle pipeline steps") {
  const CavityGeometry g;
  SampleOptions o;
  o.atoms = 4000;
  const auto ens = sample_ensemble(o, g);
  const PulseSpec p;
  const auto flipped = apply_pulse(ens, p, g, 5);
  CHECK(flipped.count(Spin::down) + flipped.count(Spin::up) == ens.atoms.size());
  CHECK(flipped.count(Spin::down) > 0);

  const auto again = apply_pulse(ens, p, g, 5);
  CHECK(again.count(Spin::down) == flipped.count(Spin::down));

  const auto kept = blow_away(flipped);
  CHECK(kept.count(Spin::up) == 0);
  CHECK(kept.retained() == flipped.count(Spin::down));
  const auto reset = repump(kept);
  CHECK(reset.count(Spin::up) == kept.retained());
  CHECK(reset.count(Spin::down) == 0);
  CHECK(blow_away(flipped, 1.0).retained() == flipped.atoms.size());
  CHECK(repump(kept, 1.0).retained() == 0);
}

TEST_CASE("particle and density pipelines agree") {
  const CavityGeometry g;
  SampleOptions o;
  o.atoms = 100000;
  const auto ens = sample_ensemble(o, g);
  SelectionSequence seq;
  seq.pulses = {PulseSpec{}, PulseSpec{}};
  const auto kept = run_sequence(ens, seq, g, 3);
  const double f_mc = static_cast<double>(kept.retained()) / static_cast<double>(ens.loaded);
  const auto sel = select_density(CouplingDensity::arcsine(), seq);
  const double sigma = std::sqrt(sel.retained_fraction * (1.0 - sel.retained_fraction) / 1e5);
  CHECK(std::abs(f_mc - sel.retained_fraction) < 5.0 * sigma);
  CHECK(sel.retained_fraction == doctest::Approx(sel.density.mass()));

  const auto st = compute_stats(kept, g, 3, 50);
  const auto sd = compute_stats(sel.density);
  CHECK(std::abs(st.mean_coupling - sd.mean_coupling) < 5.0 * st.mean_error + 1e-3);
}

TEST_CASE("density selection matches direct integration") {
  // One pulse at delta_m = 0: weight F(s = sin^2 theta) over a uniform phase.
  const double ratio = 0.05;
  auto F = [&](double s) {
    const double d = s / ratio;
    const double g2 = 1.0 + d * d;
    const double sn = std::sin(0.5 * pi * std::sqrt(g2));
    return sn * sn / g2;
  };
  auto w = [&](double th) { return F(std::sin(th) * std::sin(th)); };
  const double m0 = oracle::simpson(w, 0.0, pi, 1e-13) / pi;
  const double m1 =
      oracle::simpson([&](double th) { return w(th) * std::pow(std::cos(th), 2); }, 0.0, pi,
                      1e-13) / pi;

  SelectionSequence seq;
  seq.pulses = {PulseSpec{ratio, 0.0, 1.0}};
  const auto sel = select_density(CouplingDensity::arcsine(), seq);
  CHECK(sel.retained_fraction == doctest::Approx(m0).epsilon(1e-9));
  CHECK(sel.density.raw_moments().mean == doctest::Approx(m1 / m0).epsilon(1e-9));
}

TEST_CASE("degenerate selections are rejected") {
  SelectionSequence seq;
  seq.pulses = {PulseSpec{1e-3, 0.0, 1.0}};
  CHECK_THROWS_AS(select_density(CouplingDensity::arcsine(), seq, 0.5), DegenerateSelection);
}

TEST_CASE("round survival") {
  SelectionSequence seq;
  const PulseSpec p{0.1, 0.0, 1.0};
  CHECK(round_survival(p, seq, 0.0) == doctest::Approx(1.0));
  CHECK(round_survival(p, seq, 0.5) == doctest::Approx(pulse_flip_probability(p, 0.5)));
  seq.blow_away_survival = 1.0;
  CHECK(round_survival(p, seq, 0.5) == doctest::Approx(1.0));
}
