#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "sitesel/errors.hpp"
#include "sitesel/optomechanics.hpp"
#include "sitesel/statistics.hpp"

using namespace sitesel;

TEST_CASE("equilibrium shift against direct minimisation") {
  const CavityGeometry g;
  const double kl = two_pi / g.lattice_wavelength;
  const double kp = two_pi / g.probe_wavelength;
  for (double eps : {0.01, 0.033, 0.2}) {
    for (double phi : {0.1, 0.7, 1.2, 2.5}) {
      auto V = [&](double u) {
        return -std::pow(std::cos(kl * u), 2) - eps * std::pow(std::cos(phi + kp * u), 2);
      };
      const double ref = oracle::golden_min(V, -g.lattice_wavelength / 8.0,
                                            g.lattice_wavelength / 8.0, 1e-16);
      const double u = equilibrium_shift(phi, eps, g);
      CHECK(u == doctest::Approx(ref).epsilon(1e-4).scale(0.0));
      const double lin = equilibrium_shift(phi, eps, g, DisplacementMethod::linearized);
      CHECK(std::abs(lin - u) < 3.0 * eps * std::abs(u) + 1e-15);
    }
  }
  CHECK(std::abs(equilibrium_shift(0.0, 0.05, g)) < 1e-25);
  CHECK(equilibrium_shift(0.5, 0.0, g) == 0.0);
  CHECK_THROWS_AS(equilibrium_shift(0.5 * pi, 2.0, g), NumericError);
  CHECK_THROWS_AS(equilibrium_shift(0.5, -0.1, g), InvalidArgument);
}

TEST_CASE("atoms are pulled towards the probe antinode") {
  const CavityGeometry g;
  for (double phi : {0.2, 0.9, 1.4}) {
    const double eta0 = std::pow(std::cos(phi), 2);
    CHECK(displaced_eta(phi, 0.02, g) > eta0);
    CHECK(displaced_eta(pi - phi, 0.02, g) == doctest::Approx(displaced_eta(phi, 0.02, g)));
  }
}

TEST_CASE("trap model") {
  const CavityGeometry g;
  TrapModel t;
  CHECK(hz_from_angular(t.radial_frequency(g)) == doctest::Approx(528.0).epsilon(0.01));
  t.radial_frequency_hz = 700.0;
  CHECK(hz_from_angular(t.radial_frequency(g)) == doctest::Approx(700.0));
  t.probe_depth_ratio = -1.0;
  CHECK_THROWS_AS(t.validate(), InvalidArgument);
  // Harmonic expansion: U_l k_l^2 * 2 / m = w_ax^2
  TrapModel u;
  const double kl = two_pi / g.lattice_wavelength;
  CHECK(std::sqrt(2.0 * u.lattice_depth(g) * kl * kl / u.atom_mass) ==
        doctest::Approx(angular_from_hz(u.axial_frequency_hz)));
}

TEST_CASE("toggle experiment") {
  const CavityGeometry g;
  const TrapModel trap;
  ToggleOptions opts;
  const auto prior = CouplingDensity::arcsine();
  const auto ref = toggle_experiment(prior, 1000.0, trap, g, opts);
  CHECK(ref.shift_high > ref.shift_low);
  CHECK(suppression_ratio(ref, ref) == doctest::Approx(1.0));
  CHECK(ref.trace.time.size() == 400);
  CHECK(ref.trace.shift.front() == doctest::Approx(ref.shift_low));
  const auto [lo, hi] = std::minmax_element(ref.trace.shift.begin(), ref.trace.shift.end());
  CHECK(*lo == doctest::Approx(ref.shift_low));
  CHECK(*hi < ref.shift_high);
  CHECK(*hi > ref.shift_low + 0.99 * (ref.shift_high - ref.shift_low));

  // Closed form of the first-order response for the arcsine law:
  // d<eta> = <sin^2 2phi> eps kp^2 / (2 kl^2) per unit eps, <sin^2 2phi> = 1/2.
  const double kl = two_pi / g.lattice_wavelength, kp = two_pi / g.probe_wavelength;
  const double de = 0.5 * kp * kp / (2.0 * kl * kl) * trap.probe_depth_ratio * (opts.power_ratio - 1.0);
  CHECK(ref.fractional_amplitude == doctest::Approx(de / 0.5).epsilon(0.02));

  SampleOptions so;
  so.atoms = 50000;
  const auto ens = sample_ensemble(so, g);
  const auto mc = toggle_experiment(ens, trap, g, opts);
  CHECK(mc.fractional_amplitude == doctest::Approx(ref.fractional_amplitude).epsilon(0.03));

  ToggleOptions bad = opts;
  bad.cycles = 0;
  CHECK_THROWS_AS(toggle_experiment(prior, 1.0, trap, g, bad), InvalidArgument);
  AtomEnsemble none;
  CHECK_THROWS_AS(toggle_experiment(none, trap, g, opts), EmptyEnsemble);
}

TEST_CASE("suppression ratio does not depend on the probe depth to first order") {
  const CavityGeometry g;
  SelectionSequence seq;
  const double stark = angular_from_hz(32.7e3);
  seq.pulses = {PulseSpec{0.08 * stark, 0.0, stark}, PulseSpec{0.08 * stark, 0.0, stark}};
  const auto sel = select_density(CouplingDensity::arcsine(), seq);
  ToggleOptions opts;
  opts.method = DisplacementMethod::linearized;
  std::vector<double> r;
  for (double eps : {0.005, 0.01, 0.02}) {
    TrapModel t;
    t.probe_depth_ratio = eps;
    r.push_back(suppression_ratio(toggle_experiment(sel.density, 1.0, t, g, opts),
                                  toggle_experiment(CouplingDensity::arcsine(), 1.0, t, g, opts)));
  }
  CHECK(std::abs(r[0] / r[1] - 1.0) < 0.02);
  CHECK(std::abs(r[2] / r[1] - 1.0) < 0.02);

  // The full solution converges to the same value as eps -> 0.
  TrapModel weak;
  weak.probe_depth_ratio = 1e-4;
  const double full = suppression_ratio(toggle_experiment(sel.density, 1.0, weak, g),
                                        toggle_experiment(CouplingDensity::arcsine(), 1.0, weak, g));
  opts.method = DisplacementMethod::linearized;
  const double lin = suppression_ratio(toggle_experiment(sel.density, 1.0, weak, g, opts),
                                       toggle_experiment(CouplingDensity::arcsine(), 1.0, weak, g, opts));
  CHECK(std::abs(full / lin - 1.0) < 1e-3);
}

TEST_CASE("quadratic fit") {
  std::vector<double> x, y;
  for (int i = -5; i <= 5; ++i) {
    x.push_back(0.1 * i);
    y.push_back(3.0 * std::pow(0.1 * i - 0.05, 2) + 0.2);
  }
  const auto q = fit_quadratic(x, y);
  CHECK(q.curvature == doctest::Approx(3.0));
  CHECK(q.center == doctest::Approx(0.05));
  CHECK(q.floor == doctest::Approx(0.2));
  CHECK(q.r_squared == doctest::Approx(1.0));
  CHECK_THROWS_AS(fit_quadratic(std::vector<double>{1, 2}, std::vector<double>{1, 2}), FitError);
}

TEST_CASE("position scan is symmetric") {
  const CavityGeometry g;
  ScanScenario sc;
  const double stark = angular_from_hz(32.7e3);
  sc.sequence.pulses = {PulseSpec{0.08 * stark, 0.0, stark}};
  sc.position_nodes = 16;
  const std::vector<double> off = {-0.4e-3, 0.0, 0.4e-3};
  const auto pts = position_scan(off, sc, g);
  REQUIRE(pts.size() == 3);
  CHECK(pts[0].ratio == doctest::Approx(pts[2].ratio).epsilon(1e-9));
  CHECK(pts[1].ratio < pts[0].ratio);
  CHECK(pts[1].mean_coupling > pts[0].mean_coupling);
}

TEST_CASE("spectral helpers") {
  const double dt = 1e-4;
  std::vector<double> s(1000);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = 5.0 + std::sin(two_pi * 250.0 * i * dt);
  CHECK(dominant_frequency(s, dt) == doctest::Approx(250.0));
  CHECK(fractional_amplitude(std::vector<double>{1.0, 3.0}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(dominant_frequency(std::vector<double>{1.0, 2.0}, dt), InvalidArgument);

  CHECK(compose_amplitudes(3.0, 4.0, Composition::root_sum_square) == doctest::Approx(5.0));
  CHECK(compose_amplitudes(3.0, 4.0, Composition::coherent) == doctest::Approx(7.0));
  CHECK(remove_radial_contribution(5.0, 4.0, Composition::root_sum_square) == doctest::Approx(3.0));
  CHECK(remove_radial_contribution(7.0, 4.0, Composition::coherent) == doctest::Approx(3.0));
  CHECK_THROWS_AS(remove_radial_contribution(1.0, 2.0, Composition::root_sum_square),
                  InvalidArgument);
}

namespace {

AtomEnsemble on_axis(std::size_t n) {
  const CavityGeometry g;
  SampleOptions o;
  o.atoms = n;
  return sample_ensemble(o, g);
}

}  // namespace

TEST_CASE("breathing follows the thermal width") {
  const CavityGeometry g;
  const TrapModel trap;
  const auto ens = on_axis(100000);
  BreathingOptions bo;
  bo.duration = 4e-3;
  bo.samples = 64;
  bo.seed = 8;
  bo.phase_space = PhaseSpace::sampled;
  const auto tr = radial_breathing(ens, trap, g, bo);
  bo.phase_space = PhaseSpace::thermal_average;
  const auto avg = radial_breathing(ens, trap, g, bo);

  const double wb = dressed_radial_frequency(trap, g, trap.probe_depth_ratio);
  const double wa = dressed_radial_frequency(trap, g, trap.probe_depth_ratio * bo.power_ratio);
  CHECK(wa > wb);
  const double kt = boltzmann * trap.radial_temperature;
  const double sx2 = kt / (trap.atom_mass * wb * wb);
  const double sv2 = kt / trap.atom_mass;
  double eta_sum = 0.0;
  for (double e : ens.retained_eta(g)) eta_sum += e;
  const double norm = eta_sum * g.single_atom_shift();
  const double w2 = g.mode_waist * g.mode_waist;
  for (std::size_t k = 0; k < tr.time.size(); ++k) {
    const double t = tr.time[k];
    const double s2 = sx2 * std::pow(std::cos(wa * t), 2) + sv2 / (wa * wa) * std::pow(std::sin(wa * t), 2);
    const double expect = 1.0 / (1.0 + 4.0 * s2 / w2);
    CHECK(tr.shift[k] / norm == doctest::Approx(expect).epsilon(1e-3));
    CHECK(avg.shift[k] / norm == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("breathing is absent without a kick") {
  const CavityGeometry g;
  TrapModel cold;
  cold.radial_temperature = 0.0;
  const auto ens = on_axis(200);
  BreathingOptions bo;
  bo.samples = 256;
  CHECK(fractional_amplitude(radial_breathing(ens, cold, g, bo).shift) < 1e-14);

  TrapModel warm;
  bo.depth_ratio_before = bo.depth_ratio_after = 0.02;
  CHECK(fractional_amplitude(radial_breathing(ens, warm, g, bo).shift) < 1e-14);
  bo.depth_ratio_after = 0.05;
  CHECK(fractional_amplitude(radial_breathing(ens, warm, g, bo).shift) > 1e-4);
  BreathingOptions bad;
  bad.samples = 1;
  CHECK_THROWS_AS(radial_breathing(ens, warm, g, bad), InvalidArgument);
}
