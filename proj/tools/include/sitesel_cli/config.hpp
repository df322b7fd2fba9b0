#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sitesel/cavity_field.hpp"
#include "sitesel/optomechanics.hpp"
#include "sitesel/selection.hpp"
#include "sitesel/spectroscopy.hpp"
#include "sitesel/statistics.hpp"

namespace sitesel::cli {

/// Bad or inconsistent configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& msg, int line = -1);
  int line() const { return line_; }

 private:
  int line_;
};

enum class Scenario {
  selection,
  tradeoff,
  spectrum,
  invert,
  fluorescence,
  optomech_toggle,
  position_scan,
  radial,
  fit,
};

const char* scenario_name(Scenario s);
Scenario parse_scenario(const std::string& name);
const std::vector<std::string>& scenario_names();

// Everything below is stored in the units used by the config file: Hz, m, s,
// K. Conversion to angular frequencies happens when the core types are built.

struct GeometryConfig {
  double lattice_wavelength_m = 813e-9;
  double probe_wavelength_m = 780e-9;
  double atomic_wavelength_m = 780e-9;
  double free_spectral_range_hz = 6.791e9;
  double hyperfine_splitting_hz = 6.834e9;
  double probe_detuning_hz = 700e6;
  double stark_detuning_hz = 700e6;
  double peak_coupling_hz = std::sqrt(150.0 * 700e6);  // g0 / 2pi
  double mode_waist_m = 71e-6;
  StarkModeSign stark_mode = StarkModeSign::plus;
  ModeSymmetry symmetry = ModeSymmetry::probe_antinode;

  CavityGeometry build() const;
};

struct EnsembleConfig {
  std::size_t atoms = 100000;
  double extent_m = 1e-3;
  double z_offset_m = 0.0;
  AxialProfile profile = AxialProfile::uniform;
  double radial_sigma_m = 0.0;

  SampleOptions build(std::uint64_t seed) const;
};

struct PulseConfig {
  double rabi_hz = 2.04e3;
  double detuning_hz = 0.0;
  double stark_hz = 32.7e3;
};

struct SelectionConfig {
  std::vector<PulseConfig> pulses = {PulseConfig{}};
  bool repump_between = true;
  double blow_away_survival = 0.0;
  double repump_loss = 0.0;
  double floor = default_selection_floor;

  SelectionSequence build() const;
};

struct CurveConfig {
  std::string label;
  std::vector<double> rabi_scale;  ///< per-pulse Rabi frequency relative to the first
};

struct TradeoffConfig {
  double ratio_min = 1e-6;
  double ratio_max = 0.5;
  std::size_t ratio_points = 60;
  double detuning_fraction = 0.0;  ///< delta_m / delta_s
  double stark_hz = 32.7e3;
  std::vector<CurveConfig> curves = {{"1 pulse", {1.0}},
                                     {"2 pulses", {1.0, 1.0}},
                                     {"3 pulses", {1.0, 1.0, 1.0}},
                                     {"4 pulses", {1.0, 1.0, 1.0, 1.0}},
                                     {"2 pulses varying Rabi", {1.0, 1.4142135623730951}}};
};

struct SpectrumConfig {
  double probe_rabi_hz = 170.0;
  double stark_hz = 32.7e3;
  std::size_t points = 201;
  double lo = -0.2;
  double hi = 1.2;
  /// Added to every spectroscopy-pulse detuning (the "spectroscopy only"
  /// reading of a microwave offset).
  double detuning_offset_hz = 0.0;
  /// Run the selection sequence before taking the spectrum.
  bool selected = true;
};

struct InvertConfig {
  std::filesystem::path input;
  double truncation_lo = 0.4;
  double truncation_hi = 1.0;
};

struct FluorescenceConfig {
  std::vector<double> atom_count_grid = {0.2, 0.4, 0.6, 0.8, 1.0};
  double counts_per_atom = 1.0;
  double relative_noise = 0.01;
  bool fit_intercept = false;
};

struct OptomechConfig {
  double axial_frequency_hz = 205e3;
  double radial_frequency_hz = 0.0;
  double probe_depth_ratio = 0.01;
  double temperature_k = 10e-6;
  double power_ratio = 3.3;
  double window_s = 100e-6;
  std::size_t cycles = 2;
  double sample_interval_s = 1e-6;
  double lowpass_hz = 50e3;
  DisplacementMethod method = DisplacementMethod::newton;

  TrapModel trap() const;
  ToggleOptions toggle() const;
};

struct ScanConfig {
  std::vector<double> offsets_m;  ///< explicit list; otherwise min/max/points
  double offset_min_m = -0.5e-3;
  double offset_max_m = 0.5e-3;
  std::size_t points = 21;
  std::size_t position_nodes = 64;

  std::vector<double> offsets() const;
};

struct RadialConfig {
  double duration_s = 10e-3;
  std::size_t samples = 4096;
  double depth_ratio_before = -1.0;
  double depth_ratio_after = -1.0;
  double dephasing_time_s = 0.0;
  PhaseSpace phase_space = PhaseSpace::thermal_average;
  Composition composition = Composition::root_sum_square;
  /// Measured suppression ratio to correct for the radial contribution; 0 skips it.
  double measured_ratio = 0.0;
};

struct FitConfig {
  std::filesystem::path input;
  double range_min = 1e-3;
  double range_max = 0.1;
  bool weighted = false;
};

struct RunConfig {
  Scenario scenario = Scenario::selection;
  std::uint64_t seed = 1;
  Pipeline pipeline = Pipeline::density;
  std::size_t bootstrap_resamples = default_bootstrap_resamples;
  GeometryConfig geometry;
  EnsembleConfig ensemble;
  SelectionConfig selection;
  TradeoffConfig tradeoff;
  SpectrumConfig spectrum;
  InvertConfig invert;
  FluorescenceConfig fluorescence;
  OptomechConfig optomech;
  ScanConfig scan;
  RadialConfig radial;
  FitConfig fit;
};

/// Parses and validates YAML text. Relative input paths are resolved against
/// `base_dir`. Unknown keys are rejected with their line number. When
/// `expected` is given it becomes the scenario, and a conflicting `scenario`
/// key is an error.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {},
                       std::optional<Scenario> expected = std::nullopt);
RunConfig load_config(const std::filesystem::path& path,
                      std::optional<Scenario> expected = std::nullopt);

/// Range checks that do not depend on parsing; throws ConfigError.
void validate(const RunConfig& cfg);

/// Fully resolved configuration as YAML that parses back to the same values.
std::string to_yaml(const RunConfig& cfg);

}  // namespace sitesel::cli
