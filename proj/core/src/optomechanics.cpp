#include "sitesel/optomechanics.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <random>
#include <sstream>

#include "quadrature.hpp"
#include "sitesel/errors.hpp"
#include "sitesel/rng.hpp"

namespace sitesel {

namespace {

constexpr std::uint64_t kBreathingStream = stream_id("optomechanics/breathing");
constexpr int kMaxNewtonIterations = 50;

double wavenumber(double lambda) { return two_pi / lambda; }

// Probe phase phi with eta = cos^2(phi) for an atom at z.
double probe_phase_of(double z, const CavityGeometry& geo) {
  const double phase = two_pi * z / geo.probe_wavelength;
  return geo.symmetry == ModeSymmetry::probe_antinode ? phase : phase - 0.5 * pi;
}

std::vector<double> toggle_trace_levels(double low, double high, const ToggleOptions& opts,
                                        std::vector<double>& time) {
  const auto per_window = static_cast<std::size_t>(std::llround(opts.window / opts.sample_interval));
  const std::size_t windows = 2 * opts.cycles;
  std::vector<double> shift;
  shift.reserve(per_window * windows);
  time.clear();
  time.reserve(per_window * windows);
  double y = low;
  const double alpha = opts.lowpass_bandwidth_hz > 0.0
                           ? 1.0 - std::exp(-two_pi * opts.lowpass_bandwidth_hz * opts.sample_interval)
                           : 1.0;
  for (std::size_t w = 0; w < windows; ++w) {
    const double target = (w % 2 == 0) ? low : high;
    for (std::size_t k = 0; k < per_window; ++k) {
      y += alpha * (target - y);
      time.push_back(static_cast<double>(time.size()) * opts.sample_interval);
      shift.push_back(y);
    }
  }
  return shift;
}

void check_toggle_options(const ToggleOptions& opts) {
  if (!(opts.power_ratio > 0.0)) throw InvalidArgument("power ratio must be positive");
  if (!(opts.window > 0.0) || !(opts.sample_interval > 0.0) ||
      opts.sample_interval > opts.window)
    throw InvalidArgument("toggle window and sample interval must be positive");
  if (opts.cycles < 1) throw InvalidArgument("toggle needs at least one cycle");
  if (opts.lowpass_bandwidth_hz < 0.0) throw InvalidArgument("low-pass bandwidth must be >= 0");
}

ToggleResult finish_toggle(double low, double high, const ToggleOptions& opts) {
  const double mean = 0.5 * (low + high);
  if (!(mean > 0.0)) throw EmptyEnsemble("toggle experiment on an ensemble with zero mean shift");
  ToggleResult r;
  r.shift_low = low;
  r.shift_high = high;
  r.fractional_amplitude = std::abs(high - low) / mean;
  r.trace.shift = toggle_trace_levels(low, high, opts, r.trace.time);
  return r;
}

}  // namespace

void TrapModel::validate() const {
  if (!(axial_frequency_hz > 0.0)) throw InvalidArgument("axial frequency must be positive");
  if (radial_frequency_hz < 0.0) throw InvalidArgument("radial frequency must be >= 0");
  if (!(probe_depth_ratio >= 0.0)) throw InvalidArgument("probe depth ratio must be >= 0");
  if (!(radial_temperature >= 0.0)) throw InvalidArgument("temperature must be >= 0");
  if (!(atom_mass > 0.0)) throw InvalidArgument("atom mass must be positive");
}

double TrapModel::lattice_depth(const CavityGeometry& geo) const {
  const double w = angular_from_hz(axial_frequency_hz);
  const double kl = wavenumber(geo.lattice_wavelength);
  return atom_mass * w * w / (2.0 * kl * kl);
}

double TrapModel::radial_frequency(const CavityGeometry& geo) const {
  if (radial_frequency_hz > 0.0) return angular_from_hz(radial_frequency_hz);
  return std::sqrt(4.0 * lattice_depth(geo) / (atom_mass * geo.mode_waist * geo.mode_waist));
}

double equilibrium_shift(double probe_phase, double depth_ratio, const CavityGeometry& geo,
                         DisplacementMethod method) {
  if (!(depth_ratio >= 0.0)) throw InvalidArgument("probe depth ratio must be >= 0");
  const double kl = wavenumber(geo.lattice_wavelength);
  const double kp = wavenumber(geo.probe_wavelength);
  const double two_phi = 2.0 * probe_phase;
  const double linear = -depth_ratio * kp * std::sin(two_phi) / (2.0 * kl * kl);
  if (method == DisplacementMethod::linearized || depth_ratio == 0.0) return linear;

  // Potential in units of U_l, relative to the antinode:
  // V(u) = -cos^2(kl u) - eps cos^2(phi + kp u)
  double u = linear;
  for (int it = 0; it < kMaxNewtonIterations; ++it) {
    const double grad = kl * std::sin(2.0 * kl * u) + depth_ratio * kp * std::sin(two_phi + 2.0 * kp * u);
    const double curv = 2.0 * kl * kl * std::cos(2.0 * kl * u) +
                        2.0 * depth_ratio * kp * kp * std::cos(two_phi + 2.0 * kp * u);
    if (!(curv > 0.0)) throw NumericError("probe well destroys the lattice minimum");
    const double step = grad / curv;
    u -= step;
    if (std::abs(step) <= 1e-14 * geo.lattice_wavelength) return u;
  }
  throw NumericError("equilibrium search did not converge in 50 Newton iterations");
}

double axial_displacement(double z0, const TrapModel& trap, const CavityGeometry& geo,
                          DisplacementMethod method) {
  trap.validate();
  return equilibrium_shift(probe_phase_of(z0, geo), trap.probe_depth_ratio, geo, method);
}

double displaced_eta(double probe_phase, double depth_ratio, const CavityGeometry& geo,
                     DisplacementMethod method) {
  const double kp = wavenumber(geo.probe_wavelength);
  const double c = std::cos(probe_phase + kp * equilibrium_shift(probe_phase, depth_ratio, geo, method));
  return c * c;
}

ToggleResult toggle_experiment(const AtomEnsemble& ens, const TrapModel& trap,
                               const CavityGeometry& geo, const ToggleOptions& opts) {
  trap.validate();
  check_toggle_options(opts);
  const double eps_low = trap.probe_depth_ratio;
  const double eps_high = eps_low * opts.power_ratio;
  double low = 0.0;
  double high = 0.0;
  std::size_t n = 0;
  for (const auto& a : ens.atoms) {
    if (a.spin == Spin::removed) continue;
    const double phi = probe_phase_of(a.z, geo);
    low += displaced_eta(phi, eps_low, geo, opts.method);
    high += displaced_eta(phi, eps_high, geo, opts.method);
    ++n;
  }
  if (n == 0) throw EmptyEnsemble("toggle experiment needs retained atoms");
  const double dw0 = geo.single_atom_shift();
  return finish_toggle(dw0 * low, dw0 * high, opts);
}

ToggleResult toggle_experiment(const CouplingDensity& density, double atoms,
                               const TrapModel& trap, const CavityGeometry& geo,
                               const ToggleOptions& opts) {
  trap.validate();
  check_toggle_options(opts);
  if (!(atoms > 0.0)) throw InvalidArgument("atom number must be positive");
  const double eps_low = trap.probe_depth_ratio;
  const double eps_high = eps_low * opts.power_ratio;
  // Density nodes carry eta = cos^2(theta); recover the phase from eta.
  // theta in [0, pi/2] and (pi/2, pi) give mirror-image displacements with
  // identical coupling changes, so acos(sqrt(eta)) is sufficient.
  const double low = density.integrate([&](double eta, double) {
    return displaced_eta(std::acos(std::sqrt(std::clamp(eta, 0.0, 1.0))), eps_low, geo, opts.method);
  });
  const double high = density.integrate([&](double eta, double) {
    return displaced_eta(std::acos(std::sqrt(std::clamp(eta, 0.0, 1.0))), eps_high, geo, opts.method);
  });
  const double scale = atoms * geo.single_atom_shift();
  return finish_toggle(scale * low, scale * high, opts);
}

double suppression_ratio(const ToggleResult& selected, const ToggleResult& reference) {
  if (!(reference.fractional_amplitude > 0.0))
    throw InvalidArgument("reference toggle amplitude is zero");
  return selected.fractional_amplitude / reference.fractional_amplitude;
}

std::vector<ScanPoint> position_scan(std::span<const double> offsets, const ScanScenario& scenario,
                                     const CavityGeometry& geo) {
  geo.validate();
  scenario.sequence.validate();
  scenario.trap.validate();
  const double half_length = 0.5 * geo.cavity_length();
  for (double z : offsets)
    if (!(std::abs(z) <= half_length)) throw InvalidArgument("scan offset outside the cavity");

  std::vector<ScanPoint> out;
  out.reserve(offsets.size());

  if (scenario.pipeline == Pipeline::particles) {
    for (double z : offsets) {
      SampleOptions so = scenario.ensemble;
      so.z_offset = z;
      const auto loaded = sample_ensemble(so, geo);
      const auto kept = run_sequence(loaded, scenario.sequence, geo, so.seed);
      const auto ref = toggle_experiment(loaded, scenario.trap, geo, scenario.toggle);
      const auto sel = toggle_experiment(kept, scenario.trap, geo, scenario.toggle);
      double eta_sum = 0.0;
      for (double e : kept.retained_eta(geo)) eta_sum += e;
      const auto n = static_cast<double>(kept.retained());
      out.push_back({z, suppression_ratio(sel, ref), n / static_cast<double>(loaded.loaded),
                     eta_sum / n});
    }
    return out;
  }

  if (scenario.position_nodes < 1) throw InvalidArgument("position scan needs quadrature nodes");
  const auto reference = toggle_experiment(CouplingDensity::arcsine(), 1.0, scenario.trap, geo,
                                           scenario.toggle);
  const double extent = scenario.ensemble.extent;
  if (!(extent > 0.0)) throw InvalidArgument("ensemble extent must be positive");

  // Axial profile as (position, weight) nodes relative to the centre.
  std::vector<std::pair<double, double>> nodes;
  const std::size_t n = scenario.position_nodes;
  if (scenario.ensemble.profile == AxialProfile::uniform) {
    for (std::size_t j = 0; j < n; ++j)
      nodes.emplace_back(extent * ((static_cast<double>(j) + 0.5) / static_cast<double>(n) - 0.5),
                         1.0 / static_cast<double>(n));
  } else {
    const double sigma = 0.25 * extent;
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double x = 3.0 * sigma * (2.0 * (static_cast<double>(j) + 0.5) / static_cast<double>(n) - 1.0);
      const double w = std::exp(-0.5 * x * x / (sigma * sigma));
      nodes.emplace_back(x, w);
      total += w;
    }
    for (auto& node : nodes) node.second /= total;
  }

  for (double z : offsets) {
    double low = 0.0, high = 0.0, kept = 0.0, eta_sum = 0.0;
    for (const auto& [dz, w] : nodes) {
      const double slip = 0.5 * intensity_phase_slip(z + dz, geo);
      const auto sel = select_density(CouplingDensity::arcsine(slip), scenario.sequence);
      const auto t = toggle_experiment(sel.density, 1.0, scenario.trap, geo, scenario.toggle);
      low += w * t.shift_low;
      high += w * t.shift_high;
      kept += w * sel.retained_fraction;
      eta_sum += w * sel.density.integrate([](double eta, double) { return eta; });
    }
    const double a = std::abs(high - low) / (0.5 * (high + low));
    out.push_back({z, a / reference.fractional_amplitude, kept, eta_sum / kept});
  }
  return out;
}

QuadraticFit fit_quadratic(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3) throw FitError("quadratic fit needs 3 or more points");
  // Normal equations for y = c0 + c1 x + c2 x^2.
  double s[5] = {0, 0, 0, 0, 0};
  double t[3] = {0, 0, 0};
  for (std::size_t i = 0; i < x.size(); ++i) {
    double p = 1.0;
    for (int k = 0; k < 5; ++k) {
      s[k] += p;
      if (k < 3) t[k] += p * y[i];
      p *= x[i];
    }
  }
  const double a[3][3] = {{s[0], s[1], s[2]}, {s[1], s[2], s[3]}, {s[2], s[3], s[4]}};
  auto det3 = [](const double m[3][3]) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  };
  const double d = det3(a);
  if (!(std::abs(d) > 0.0)) throw FitError("degenerate abscissae in quadratic fit");
  double c[3];
  for (int col = 0; col < 3; ++col) {
    double m[3][3];
    for (int r = 0; r < 3; ++r)
      for (int k = 0; k < 3; ++k) m[r][k] = (k == col) ? t[r] : a[r][k];
    c[col] = det3(m) / d;
  }
  QuadraticFit fit;
  fit.curvature = c[2];
  fit.center = c[2] != 0.0 ? -c[1] / (2.0 * c[2]) : 0.0;
  fit.floor = c[0] - c[2] * fit.center * fit.center;

  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double pred = c[0] + c[1] * x[i] + c[2] * x[i] * x[i];
    ss_res += (y[i] - pred) * (y[i] - pred);
    ss_tot += (y[i] - mean) * (y[i] - mean);
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

double dressed_radial_frequency(const TrapModel& trap, const CavityGeometry& geo, double eps) {
  if (!(eps >= 0.0)) throw InvalidArgument("probe depth ratio must be >= 0");
  return trap.radial_frequency(geo) * std::sqrt(1.0 + eps);
}

Trace radial_breathing(const AtomEnsemble& ens, const TrapModel& trap, const CavityGeometry& geo,
                       const BreathingOptions& opts) {
  trap.validate();
  if (!(opts.duration > 0.0) || opts.samples < 2)
    throw InvalidArgument("breathing trace needs a positive duration and two or more samples");
  if (opts.dephasing_time < 0.0) throw InvalidArgument("dephasing time must be >= 0");
  const double eps_before =
      opts.depth_ratio_before >= 0.0 ? opts.depth_ratio_before : trap.probe_depth_ratio;
  const double eps_after = opts.depth_ratio_after >= 0.0
                               ? opts.depth_ratio_after
                               : trap.probe_depth_ratio * opts.power_ratio;
  const double w_before = dressed_radial_frequency(trap, geo, eps_before);
  const double w_after = dressed_radial_frequency(trap, geo, eps_after);
  if (!(w_before > 0.0) || !(w_after > 0.0))
    throw InvalidArgument("radial frequency must be positive at both probe powers");

  const double kt = boltzmann * trap.radial_temperature;
  const double sigma_x = std::sqrt(kt / (trap.atom_mass * w_before * w_before));
  const double sigma_v = std::sqrt(kt / trap.atom_mass);
  const double inv_w2 = 2.0 / (geo.mode_waist * geo.mode_waist);
  const double dt = opts.duration / static_cast<double>(opts.samples);

  Trace trace;
  trace.time.resize(opts.samples);
  trace.shift.assign(opts.samples, 0.0);
  std::vector<double> cos_t(opts.samples), sin_t(opts.samples);
  for (std::size_t k = 0; k < opts.samples; ++k) {
    trace.time[k] = static_cast<double>(k) * dt;
    cos_t[k] = std::cos(w_after * trace.time[k]);
    sin_t[k] = std::sin(w_after * trace.time[k]);
  }

  std::size_t n = 0;
  double eta_sum = 0.0;
  for (std::size_t i = 0; i < ens.atoms.size(); ++i) {
    const Atom& a = ens.atoms[i];
    if (a.spin == Spin::removed) continue;
    ++n;
    const double eta = coupling_eta(a.z, geo);
    eta_sum += eta;
    if (opts.phase_space == PhaseSpace::thermal_average) continue;
    double x0 = 0.0, y0 = 0.0, vx = 0.0, vy = 0.0;
    if (kt > 0.0) {
      auto engine = make_engine(opts.seed, kBreathingStream, i);
      std::normal_distribution<double> gauss(0.0, 1.0);
      x0 = sigma_x * gauss(engine);
      y0 = sigma_x * gauss(engine);
      vx = sigma_v * gauss(engine);
      vy = sigma_v * gauss(engine);
    }
    for (std::size_t k = 0; k < opts.samples; ++k) {
      const double x = x0 * cos_t[k] + vx / w_after * sin_t[k];
      const double y = y0 * cos_t[k] + vy / w_after * sin_t[k];
      trace.shift[k] += eta * std::exp(-inv_w2 * (x * x + y * y));
    }
  }
  if (opts.phase_space == PhaseSpace::thermal_average) {
    // Per axis the width evolves as sx^2 cos^2 + (sv/w)^2 sin^2; a Gaussian
    // of variance s2 in two axes averages exp(-2 rho^2/w^2) to 1/(1 + 2 s2 inv_w2).
    const double sv_w = sigma_v / w_after;
    for (std::size_t k = 0; k < opts.samples; ++k) {
      const double s2 = sigma_x * sigma_x * cos_t[k] * cos_t[k] + sv_w * sv_w * sin_t[k] * sin_t[k];
      trace.shift[k] = eta_sum / (1.0 + 2.0 * inv_w2 * s2);
    }
  }
  if (n == 0) throw EmptyEnsemble("radial breathing needs retained atoms");

  const double dw0 = geo.single_atom_shift();
  for (double& s : trace.shift) s *= dw0;
  if (opts.dephasing_time > 0.0) {
    double mean = 0.0;
    for (double s : trace.shift) mean += s;
    mean /= static_cast<double>(trace.shift.size());
    for (std::size_t k = 0; k < opts.samples; ++k)
      trace.shift[k] = mean + (trace.shift[k] - mean) * std::exp(-trace.time[k] / opts.dephasing_time);
  }
  return trace;
}

double dominant_frequency(std::span<const double> signal, double sample_interval) {
  const std::size_t n = signal.size();
  if (n < 4 || !(sample_interval > 0.0))
    throw InvalidArgument("spectral analysis needs 4+ samples and a positive interval");
  std::vector<double> in(signal.begin(), signal.end());
  double mean = 0.0;
  for (double v : in) mean += v;
  mean /= static_cast<double>(n);
  for (double& v : in) v -= mean;
  std::vector<std::complex<double>> out(n / 2 + 1);
  const std::unique_ptr<fftw_plan_s, decltype(&fftw_destroy_plan)> plan(
      fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(),
                           reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE),
      &fftw_destroy_plan);
  fftw_execute(plan.get());
  std::size_t best = 1;
  for (std::size_t k = 2; k < out.size(); ++k)
    if (std::norm(out[k]) > std::norm(out[best])) best = k;
  return static_cast<double>(best) / (static_cast<double>(n) * sample_interval);
}

double fractional_amplitude(std::span<const double> signal) {
  if (signal.empty()) throw InvalidArgument("empty signal");
  const auto [lo, hi] = std::minmax_element(signal.begin(), signal.end());
  double mean = 0.0;
  for (double v : signal) mean += v;
  mean /= static_cast<double>(signal.size());
  if (!(mean > 0.0)) throw InvalidArgument("signal mean must be positive");
  return (*hi - *lo) / mean;
}

double compose_amplitudes(double axial, double radial, Composition rule) {
  return rule == Composition::root_sum_square ? std::hypot(axial, radial) : axial + radial;
}

double remove_radial_contribution(double total, double radial, Composition rule) {
  if (rule == Composition::coherent) return total - radial;
  const double sq = total * total - radial * radial;
  if (sq < 0.0) throw InvalidArgument("radial contribution exceeds the total amplitude");
  return std::sqrt(sq);
}

}  // namespace sitesel
