#include <algorithm>
#include <cmath>
#include <map>

#include "sitesel/errors.hpp"
#include "sitesel_cli/run.hpp"

namespace sitesel::cli {

namespace {

constexpr std::size_t kHistogramBins = 50;

CsvTable stats_table(const CouplingStats& s, const std::string& pipeline, std::size_t pulses,
                     double loaded) {
  CsvTable t({"pipeline", "pulses", "atoms_loaded", "atoms_retained", "retained_fraction",
              "retained_fraction_error", "mean_coupling", "mean_coupling_error",
              "fractional_spread", "fractional_spread_error"});
  t.row() << pipeline << static_cast<double>(pulses) << loaded
          << (pipeline == "density" ? loaded * s.retained_fraction
                                    : static_cast<double>(s.n_retained))
          << s.retained_fraction << s.fraction_error << s.mean_coupling << s.mean_error
          << s.fractional_spread << s.spread_error;
  return t;
}

CouplingDensity prior_at(const RunConfig& cfg, const CavityGeometry& geo) {
  return CouplingDensity::arcsine(0.5 * intensity_phase_slip(cfg.ensemble.z_offset_m, geo));
}

std::string pulse_note(const RunConfig& cfg) {
  std::string note = "selection detunings (Hz, positive = same sign as the Stark shift):";
  for (const auto& p : cfg.selection.pulses) note += " " + format_number(p.detuning_hz);
  return note;
}

RunResult run_selection(const RunConfig& cfg) {
  const auto geo = cfg.geometry.build();
  const auto seq = cfg.selection.build();
  RunResult r;
  r.notes.push_back(pulse_note(cfg));
  const double loaded = static_cast<double>(cfg.ensemble.atoms);

  if (cfg.pipeline == Pipeline::density) {
    const auto sel = select_density(prior_at(cfg, geo), seq, cfg.selection.floor);
    const auto st = compute_stats(sel.density);
    r.files.push_back({"summary.csv", stats_table(st, "density", seq.pulses.size(), loaded).str()});
    CsvTable h({"eta_lo", "eta_hi", "density", "cdf_hi"});
    for (const auto& b : sel.density.histogram(kHistogramBins))
      h.row() << b.eta_lo << b.eta_hi << b.density << b.cdf_hi;
    r.files.push_back({"histogram.csv", h.str()});
    return r;
  }

  const auto opts = cfg.ensemble.build(cfg.seed);
  const auto ens = sample_ensemble(opts, geo);
  for (const auto& w : ens.warnings) r.notes.push_back(w);
  const auto kept = run_sequence(ens, seq, geo, cfg.seed);

  CsvTable atoms({"index", "z_m", "rho_m", "eta", "stark_fraction", "retained"});
  for (std::size_t i = 0; i < kept.atoms.size(); ++i) {
    const Atom& a = kept.atoms[i];
    atoms.row() << static_cast<double>(i) << a.z << a.rho << coupling_eta(a.z, geo)
                << stark_fraction(a.z, geo) << (a.spin == Spin::removed ? 0.0 : 1.0);
  }
  CouplingStats st;
  if (kept.retained() > 0) {
    st = compute_stats(kept, geo, cfg.seed, cfg.bootstrap_resamples);
  } else {
    st.mean_coupling = st.fractional_spread = std::nan("");
    st.mean_error = st.spread_error = std::nan("");
    r.notes.push_back("no atoms survived the selection");
  }
  r.files.push_back({"atoms.csv", atoms.str()});
  r.files.push_back({"summary.csv", stats_table(st, "particles", seq.pulses.size(), loaded).str()});
  return r;
}

RunResult run_tradeoff(const RunConfig& cfg) {
  const auto& t = cfg.tradeoff;
  const auto grid = log_grid(t.ratio_min, t.ratio_max, t.ratio_points);
  const double stark = angular_from_hz(t.stark_hz);
  CsvTable table({"curve", "label", "ratio", "retained_fraction", "mean_coupling",
                  "one_minus_mean", "fractional_spread"});
  table.add_meta("detuning_fraction", t.detuning_fraction);
  table.add_meta("stark_hz", t.stark_hz);
  for (std::size_t c = 0; c < t.curves.size(); ++c) {
    SelectionSequence seq;
    for (double f : t.curves[c].rabi_scale) seq.pulses.push_back({f * stark, 0.0, stark});
    seq.repump_between = cfg.selection.repump_between;
    seq.blow_away_survival = cfg.selection.blow_away_survival;
    seq.repump_loss = cfg.selection.repump_loss;
    for (const auto& p : tradeoff_curve(seq, grid, t.detuning_fraction * stark))
      table.row() << static_cast<double>(c) << t.curves[c].label << p.ratio << p.retained_fraction
                  << p.mean_coupling << 1.0 - p.mean_coupling << p.fractional_spread;
  }
  RunResult r;
  r.files.push_back({"tradeoff.csv", table.str()});
  return r;
}

RunResult run_fit(const RunConfig& cfg) {
  RunResult r;
  r.files.push_back({"fits.csv", fit_tradeoff_table(read_csv(cfg.fit.input), cfg.fit).str()});
  r.notes.push_back("fitted " + cfg.fit.input.string());
  return r;
}

struct PreparedDensity {
  CouplingDensity density;
  double retained_fraction = 1.0;
};

PreparedDensity prepare_density(const RunConfig& cfg, const CavityGeometry& geo, bool selected) {
  const bool run_selection = selected && !cfg.selection.pulses.empty();
  if (cfg.pipeline == Pipeline::density) {
    const auto prior = prior_at(cfg, geo);
    if (!run_selection) return {prior, 1.0};
    auto sel = select_density(prior, cfg.selection.build(), cfg.selection.floor);
    return {std::move(sel.density), sel.retained_fraction};
  }
  auto ens = sample_ensemble(cfg.ensemble.build(cfg.seed), geo);
  if (run_selection) ens = run_sequence(ens, cfg.selection.build(), geo, cfg.seed);
  const auto eta = ens.retained_eta(geo);
  if (eta.empty()) throw EmptyEnsemble("no atoms survived the selection");
  return {CouplingDensity::point_masses(eta, std::vector<double>(eta.size(), 1.0)),
          static_cast<double>(eta.size()) / static_cast<double>(ens.loaded)};
}

RunResult run_spectrum(const RunConfig& cfg) {
  const auto geo = cfg.geometry.build();
  const auto& sp = cfg.spectrum;
  const auto prepared = prepare_density(cfg, geo, sp.selected);
  const double stark = angular_from_hz(sp.stark_hz);
  // Without a Stark shift the grid keeps the scale of the selection pulses.
  double reference_hz = sp.stark_hz;
  if (!(reference_hz > 0.0))
    reference_hz = cfg.selection.pulses.empty() ? 32.7e3 : cfg.selection.pulses.front().stark_hz;
  const auto nominal = detuning_grid(angular_from_hz(reference_hz), sp.points, sp.lo, sp.hi);
  std::vector<double> applied(nominal);
  const double offset = angular_from_hz(sp.detuning_offset_hz);
  for (double& d : applied) d += offset;

  const double atoms = static_cast<double>(cfg.ensemble.atoms) * prepared.retained_fraction;
  const double dw0 = geo.single_atom_shift();
  const auto spec = synthesize_spectrum(prepared.density, angular_from_hz(sp.probe_rabi_hz), stark,
                                        applied, atoms, dw0);

  CsvTable t({"detuning_hz", "applied_detuning_hz", "eta", "cavity_shift_hz"});
  t.add_meta("probe_rabi_hz", sp.probe_rabi_hz);
  t.add_meta("stark_hz", sp.stark_hz);
  t.add_meta("atom_count", atoms);
  t.add_meta("single_atom_shift_hz", hz_from_angular(dw0));
  t.add_meta("retained_fraction", prepared.retained_fraction);
  t.add_meta("detuning_offset_hz", sp.detuning_offset_hz);
  for (std::size_t i = 0; i < nominal.size(); ++i) {
    const double eta = stark > 0.0 ? 1.0 - nominal[i] / stark : std::nan("");
    t.row() << hz_from_angular(nominal[i]) << hz_from_angular(applied[i]) << eta
            << hz_from_angular(spec.cavity_shift[i]);
  }
  RunResult r;
  r.files.push_back({"spectrum.csv", t.str()});
  r.notes.push_back(pulse_note(cfg));
  return r;
}

Spectrum spectrum_from_csv(const CsvData& d) {
  Spectrum s;
  s.probe_rabi = angular_from_hz(d.meta_number("probe_rabi_hz"));
  s.peak_stark = angular_from_hz(d.meta_number("stark_hz"));
  s.atom_count = d.meta_number("atom_count");
  s.single_atom_shift = angular_from_hz(d.meta_number("single_atom_shift_hz"));
  const auto cd = d.column("detuning_hz");
  const auto cs = d.column("cavity_shift_hz");
  for (std::size_t i = 0; i < d.rows.size(); ++i) {
    s.detuning.push_back(angular_from_hz(d.number(i, cd)));
    s.cavity_shift.push_back(angular_from_hz(d.number(i, cs)));
  }
  return s;
}

std::pair<CsvTable, CsvTable> inversion_tables(const Spectrum& spectrum, const InvertConfig& inv) {
  try {
    spectrum.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("invalid spectrum: ") + e.what());
  }
  const auto d = invert_spectrum(spectrum, inv.truncation_lo, inv.truncation_hi);
  CsvTable density({"eta", "weight", "raw_weight", "cell_width"});
  double raw_area = 0.0;
  for (std::size_t i = 0; i < d.eta.size(); ++i) {
    density.row() << d.eta[i] << d.weight[i] << d.raw_weight[i] << d.cell_width[i];
    raw_area += d.raw_weight[i] * d.cell_width[i];
  }
  CsvTable summary({"truncation_lo", "truncation_hi", "points", "raw_area", "mean_coupling",
                    "fractional_spread"});
  summary.row() << inv.truncation_lo << inv.truncation_hi << static_cast<double>(d.eta.size())
                << raw_area << d.mean() << d.fractional_spread();
  return {density, summary};
}

RunResult run_invert(const RunConfig& cfg) {
  const auto [density, summary] = inversion_tables(spectrum_from_csv(read_csv(cfg.invert.input)),
                                                   cfg.invert);
  RunResult r;
  r.files.push_back({"inverted_density.csv", density.str()});
  r.files.push_back({"inversion_summary.csv", summary.str()});
  r.notes.push_back("inverted " + cfg.invert.input.string());
  return r;
}

RunResult run_fluorescence(const RunConfig& cfg) {
  const auto geo = cfg.geometry.build();
  const auto loaded = sample_ensemble(cfg.ensemble.build(cfg.seed), geo);
  const auto kept = run_sequence(loaded, cfg.selection.build(), geo, cfg.seed);
  FluorescenceOptions fo;
  fo.atom_count_grid = cfg.fluorescence.atom_count_grid;
  fo.counts_per_atom = cfg.fluorescence.counts_per_atom;
  fo.relative_noise = cfg.fluorescence.relative_noise;
  fo.fit_intercept = cfg.fluorescence.fit_intercept;
  fo.seed = cfg.seed;
  const auto res = simulate_fluorescence_slopes(kept, loaded, geo, fo);
  const auto truth = compute_stats(kept, geo, cfg.seed, cfg.bootstrap_resamples);

  CsvTable pts({"ensemble", "atom_scale", "cavity_shift_hz", "counts"});
  auto emit = [&](const char* name, const std::vector<FluorescencePoint>& v) {
    for (std::size_t i = 0; i < v.size(); ++i)
      pts.row() << name << fo.atom_count_grid[i] << hz_from_angular(v[i].cavity_shift)
                << v[i].counts;
  };
  emit("unselected", res.unselected);
  emit("selected", res.selected);
  // counts per (rad/s) -> counts per Hz
  CsvTable summary({"slope_unselected_counts_per_hz", "slope_selected_counts_per_hz",
                    "mean_coupling_estimate", "mean_coupling_true", "mean_coupling_true_error",
                    "retained_fraction"});
  summary.row() << res.slope_unselected * two_pi << res.slope_selected * two_pi
                << res.mean_coupling_estimate << truth.mean_coupling << truth.mean_error
                << truth.retained_fraction;
  RunResult r;
  r.files.push_back({"fluorescence.csv", pts.str()});
  r.files.push_back({"fluorescence_summary.csv", summary.str()});
  r.notes.push_back(pulse_note(cfg));
  return r;
}

RunResult run_toggle(const RunConfig& cfg) {
  const auto geo = cfg.geometry.build();
  const auto trap = cfg.optomech.trap();
  const auto opts = cfg.optomech.toggle();
  const double atoms = static_cast<double>(cfg.ensemble.atoms);
  ToggleResult ref, sel;
  CouplingStats st;
  if (cfg.pipeline == Pipeline::density) {
    const auto prior = prior_at(cfg, geo);
    const auto s = select_density(prior, cfg.selection.build(), cfg.selection.floor);
    ref = toggle_experiment(prior, atoms, trap, geo, opts);
    sel = toggle_experiment(s.density, atoms, trap, geo, opts);
    st = compute_stats(s.density);
  } else {
    const auto loaded = sample_ensemble(cfg.ensemble.build(cfg.seed), geo);
    const auto kept = run_sequence(loaded, cfg.selection.build(), geo, cfg.seed);
    ref = toggle_experiment(loaded, trap, geo, opts);
    sel = toggle_experiment(kept, trap, geo, opts);
    st = compute_stats(kept, geo, cfg.seed, cfg.bootstrap_resamples);
  }
  CsvTable trace({"time_s", "reference_shift_hz", "selected_shift_hz"});
  for (std::size_t i = 0; i < ref.trace.time.size(); ++i)
    trace.row() << ref.trace.time[i] << hz_from_angular(ref.trace.shift[i])
                << hz_from_angular(sel.trace.shift[i]);
  CsvTable summary({"amplitude_reference", "amplitude_selected", "suppression_ratio",
                    "retained_fraction", "mean_coupling", "fractional_spread",
                    "probe_depth_ratio", "power_ratio"});
  summary.row() << ref.fractional_amplitude << sel.fractional_amplitude
                << suppression_ratio(sel, ref) << st.retained_fraction << st.mean_coupling
                << st.fractional_spread << cfg.optomech.probe_depth_ratio
                << cfg.optomech.power_ratio;
  RunResult r;
  r.files.push_back({"toggle_trace.csv", trace.str()});
  r.files.push_back({"toggle_summary.csv", summary.str()});
  r.notes.push_back(pulse_note(cfg));
  return r;
}

RunResult run_scan(const RunConfig& cfg) {
  const auto geo = cfg.geometry.build();
  ScanScenario sc;
  sc.sequence = cfg.selection.build();
  sc.ensemble = cfg.ensemble.build(cfg.seed);
  sc.trap = cfg.optomech.trap();
  sc.toggle = cfg.optomech.toggle();
  sc.pipeline = cfg.pipeline;
  sc.position_nodes = cfg.scan.position_nodes;
  const auto offsets = cfg.scan.offsets();
  const auto pts = position_scan(offsets, sc, geo);

  CsvTable scan({"offset_m", "r", "retained_fraction", "mean_coupling"});
  std::vector<double> x_mm, y;
  for (const auto& p : pts) {
    scan.row() << p.offset << p.ratio << p.retained_fraction << p.mean_coupling;
    x_mm.push_back(p.offset * 1e3);
    y.push_back(p.ratio);
  }
  RunResult r;
  r.files.push_back({"scan.csv", scan.str()});
  if (pts.size() >= 3) {
    const auto q = fit_quadratic(x_mm, y);
    CsvTable fit({"curvature_per_mm2", "center_m", "floor", "r_squared"});
    fit.row() << q.curvature << q.center * 1e-3 << q.floor << q.r_squared;
    r.files.push_back({"scan_fit.csv", fit.str()});
  } else {
    r.notes.push_back("fewer than 3 offsets; quadratic fit skipped");
  }
  r.notes.push_back(pulse_note(cfg));
  return r;
}

RunResult run_radial(const RunConfig& cfg) {
  const auto geo = cfg.geometry.build();
  const auto trap = cfg.optomech.trap();
  auto ens = sample_ensemble(cfg.ensemble.build(cfg.seed), geo);
  if (!cfg.selection.pulses.empty()) ens = run_sequence(ens, cfg.selection.build(), geo, cfg.seed);
  if (ens.retained() == 0) throw EmptyEnsemble("no atoms survived the selection");

  BreathingOptions bo;
  bo.duration = cfg.radial.duration_s;
  bo.samples = cfg.radial.samples;
  bo.depth_ratio_before = cfg.radial.depth_ratio_before;
  bo.depth_ratio_after = cfg.radial.depth_ratio_after;
  bo.power_ratio = cfg.optomech.power_ratio;
  bo.dephasing_time = cfg.radial.dephasing_time_s;
  bo.phase_space = cfg.radial.phase_space;
  bo.seed = cfg.seed;
  const auto trace = radial_breathing(ens, trap, geo, bo);

  const double dt = bo.duration / static_cast<double>(bo.samples);
  const double eps_after = bo.depth_ratio_after >= 0.0 ? bo.depth_ratio_after
                                                       : trap.probe_depth_ratio * bo.power_ratio;
  const double expected = 2.0 * hz_from_angular(dressed_radial_frequency(trap, geo, eps_after));
  const double amplitude = fractional_amplitude(trace.shift);
  const auto reference = toggle_experiment(CouplingDensity::arcsine(), 1.0, trap, geo,
                                           cfg.optomech.toggle());
  const double radial_ratio = amplitude / reference.fractional_amplitude;

  CsvTable t({"time_s", "shift_hz"});
  for (std::size_t i = 0; i < trace.time.size(); ++i)
    t.row() << trace.time[i] << hz_from_angular(trace.shift[i]);
  CsvTable summary({"dominant_frequency_hz", "expected_frequency_hz", "fft_bin_hz",
                    "fractional_amplitude", "radial_ratio", "measured_ratio", "corrected_ratio"});
  double corrected = std::nan("");
  if (cfg.radial.measured_ratio > 0.0)
    corrected = remove_radial_contribution(cfg.radial.measured_ratio, radial_ratio,
                                           cfg.radial.composition);
  summary.row() << dominant_frequency(trace.shift, dt) << expected << 1.0 / bo.duration
                << amplitude << radial_ratio << cfg.radial.measured_ratio << corrected;
  RunResult r;
  r.files.push_back({"radial_trace.csv", t.str()});
  r.files.push_back({"radial_summary.csv", summary.str()});
  return r;
}

}  // namespace

CsvTable fit_tradeoff_table(const CsvData& d, const FitConfig& fit) {
  const auto c_curve = d.column("curve");
  const auto c_label = d.column("label");
  const auto c_x = d.column("retained_fraction");
  const auto c_mean = d.column("one_minus_mean");
  const auto c_spread = d.column("fractional_spread");

  std::vector<std::string> order;
  std::map<std::string, std::vector<std::size_t>> rows;
  for (std::size_t i = 0; i < d.rows.size(); ++i) {
    const std::string& key = d.rows[i][c_curve];
    if (!rows.count(key)) order.push_back(key);
    rows[key].push_back(i);
  }
  if (order.empty()) throw ConfigError("trade-off table has no rows");

  CsvTable out({"curve", "label", "quantity", "prefactor", "exponent", "points", "residual_rms",
                "range_min", "range_max"});
  const FitRange range{fit.range_min, fit.range_max};
  for (const auto& key : order) {
    std::vector<double> x, ym, ys, w;
    for (std::size_t i : rows[key]) {
      x.push_back(d.number(i, c_x));
      ym.push_back(d.number(i, c_mean));
      ys.push_back(d.number(i, c_spread));
      w.push_back(x.back());
    }
    const std::string& label = d.rows[rows[key].front()][c_label];
    const std::span<const double> weights = fit.weighted ? std::span<const double>(w)
                                                         : std::span<const double>();
    const auto a = fit_power_law(x, ym, range, weights);
    const auto b = fit_power_law(x, ys, range, weights);
    out.row() << key << label << "one_minus_mean" << a.prefactor << a.exponent
              << static_cast<double>(a.points) << a.residual_norm << fit.range_min
              << fit.range_max;
    out.row() << key << label << "fractional_spread" << b.prefactor << b.exponent
              << static_cast<double>(b.points) << b.residual_norm << fit.range_min
              << fit.range_max;
  }
  return out;
}

RunResult run_scenario(const RunConfig& cfg) {
  switch (cfg.scenario) {
    case Scenario::selection: return run_selection(cfg);
    case Scenario::tradeoff: return run_tradeoff(cfg);
    case Scenario::spectrum: return run_spectrum(cfg);
    case Scenario::invert: return run_invert(cfg);
    case Scenario::fluorescence: return run_fluorescence(cfg);
    case Scenario::optomech_toggle: return run_toggle(cfg);
    case Scenario::position_scan: return run_scan(cfg);
    case Scenario::radial: return run_radial(cfg);
    case Scenario::fit: return run_fit(cfg);
  }
  throw ConfigError("unhandled scenario");
}

// Used by reproduce to invert spectra held in memory.
std::pair<std::string, std::string> invert_spectrum_text(const std::string& spectrum_csv,
                                                         const InvertConfig& inv) {
  const auto [density, summary] = inversion_tables(spectrum_from_csv(parse_csv(spectrum_csv)), inv);
  return {density.str(), summary.str()};
}

}  // namespace sitesel::cli
