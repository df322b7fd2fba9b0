#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sitesel/cavity_field.hpp"
#include "sitesel/selection.hpp"

namespace sitesel {

/// Optical-lattice trap seen by the atoms; the probe adds a shallow standing
/// wave of relative depth probe_depth_ratio.
struct TrapModel {
  double axial_frequency_hz = 205e3;
  /// 0 derives the radial frequency from the axial one and the mode waist.
  double radial_frequency_hz = 0.0;
  double probe_depth_ratio = 0.01;   ///< epsilon = U_p / U_l
  double radial_temperature = 10e-6; ///< K
  double atom_mass = rb87_mass;

  void validate() const;
  /// U_l = m w_ax^2 lambda_l^2 / (8 pi^2), from the harmonic expansion of the well.
  double lattice_depth(const CavityGeometry& geo) const;
  /// rad/s; sqrt(4 U_l / (m w^2)) unless overridden.
  double radial_frequency(const CavityGeometry& geo) const;
};

enum class DisplacementMethod { newton, linearized };

/// Equilibrium shift of an atom that sits at a lattice antinode with probe
/// phase k_p z0 = probe_phase, once a probe well of relative depth
/// `depth_ratio` is added. Newton iteration on the full potential, or the
/// first-order estimate -eps k_p sin(2 k_p z0) / (2 k_l^2).
double equilibrium_shift(double probe_phase, double depth_ratio, const CavityGeometry& geo,
                         DisplacementMethod method = DisplacementMethod::newton);

/// Same for an atom at axial position z0 (assumed to be a lattice antinode).
double axial_displacement(double z0, const TrapModel& trap, const CavityGeometry& geo,
                          DisplacementMethod method = DisplacementMethod::newton);

/// Coupling of the displaced atom.
double displaced_eta(double probe_phase, double depth_ratio, const CavityGeometry& geo,
                     DisplacementMethod method = DisplacementMethod::newton);

struct Trace {
  std::vector<double> time;   ///< s
  std::vector<double> shift;  ///< rad/s
};

struct ToggleOptions {
  double power_ratio = 3.3;   ///< high / low probe power
  double window = 100e-6;     ///< s per power level
  std::size_t cycles = 2;
  double sample_interval = 1e-6;
  /// First-order low-pass applied to the trace; 0 disables it.
  double lowpass_bandwidth_hz = 50e3;
  DisplacementMethod method = DisplacementMethod::newton;
};

struct ToggleResult {
  Trace trace;
  double shift_low = 0.0;   ///< equilibrium dressed shift at low power [rad/s]
  double shift_high = 0.0;
  double fractional_amplitude = 0.0;  ///< |high - low| / mean
};

/// Quasi-static response of the retained atoms to toggling the probe power
/// between eps and eps * power_ratio.
ToggleResult toggle_experiment(const AtomEnsemble& ens, const TrapModel& trap,
                               const CavityGeometry& geo, const ToggleOptions& opts = {});

/// Density version; the shift is scaled to `atoms` atoms times the density's mass.
ToggleResult toggle_experiment(const CouplingDensity& density, double atoms,
                               const TrapModel& trap, const CavityGeometry& geo,
                               const ToggleOptions& opts = {});

/// r = a_s / a_0.
double suppression_ratio(const ToggleResult& selected, const ToggleResult& reference);

enum class Pipeline { density, particles };

struct ScanScenario {
  SelectionSequence sequence;
  SampleOptions ensemble;  ///< extent, profile, atoms and seed; z_offset is overridden
  TrapModel trap;
  ToggleOptions toggle;
  Pipeline pipeline = Pipeline::density;
  /// Axial quadrature nodes across the ensemble for the density pipeline.
  std::size_t position_nodes = 64;
};

struct ScanPoint {
  double offset = 0.0;  ///< m
  double ratio = 0.0;   ///< r
  double retained_fraction = 0.0;
  double mean_coupling = 0.0;
};

/// Selection followed by the toggle experiment for an ensemble centred at
/// each offset. The probe/Stark phase slip grows with distance from the
/// mid-plane, which degrades the selection.
std::vector<ScanPoint> position_scan(std::span<const double> offsets, const ScanScenario& scenario,
                                     const CavityGeometry& geo);

/// y = curvature (x - center)^2 + floor.
struct QuadraticFit {
  double curvature = 0.0;
  double center = 0.0;
  double floor = 0.0;
  double r_squared = 0.0;
};

QuadraticFit fit_quadratic(std::span<const double> x, std::span<const double> y);

enum class PhaseSpace {
  /// Exact average over the thermal Gaussian for every atom.
  thermal_average,
  /// One random phase-space point per atom.
  sampled,
};

struct BreathingOptions {
  double duration = 10e-3;
  std::size_t samples = 4096;
  /// Probe depth ratio before and after the sudden switch. Negative values
  /// mean "use the trap's ratio" and "trap ratio * power_ratio".
  double depth_ratio_before = -1.0;
  double depth_ratio_after = -1.0;
  double power_ratio = 3.3;
  /// Exponential decay time of the breathing oscillation; 0 disables it.
  double dephasing_time = 0.0;
  PhaseSpace phase_space = PhaseSpace::thermal_average;
  std::uint64_t seed = 0;
};

/// Radial frequency with a probe well of relative depth eps added on top of
/// the lattice.
double dressed_radial_frequency(const TrapModel& trap, const CavityGeometry& geo, double eps);

/// Dressed-cavity shift while the radial cloud breathes after a sudden change
/// of the radial confinement. Initial radial phase space is thermal in the
/// pre-switch trap; each atom is weighted by eta * exp(-2 rho^2 / w^2),
/// either averaged over the thermal distribution or at a sampled point.
Trace radial_breathing(const AtomEnsemble& ens, const TrapModel& trap, const CavityGeometry& geo,
                       const BreathingOptions& opts = {});

/// Frequency in Hz of the largest non-DC Fourier component of a uniformly
/// sampled signal.
double dominant_frequency(std::span<const double> signal, double sample_interval);

/// (max - min) / mean of a trace.
double fractional_amplitude(std::span<const double> signal);

enum class Composition { root_sum_square, coherent };

/// Total modulation amplitude from independent axial and radial parts.
double compose_amplitudes(double axial, double radial, Composition rule);

/// Axial part left after removing a known radial contribution.
double remove_radial_contribution(double total, double radial, Composition rule);

}  // namespace sitesel
