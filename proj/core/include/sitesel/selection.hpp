#pragma once

#include <cstdint>
#include <vector>

#include "sitesel/cavity_field.hpp"

namespace sitesel {

/// Square microwave pi-pulse applied while the Stark beam is on.
///
/// Sign convention: an atom with Stark fraction s has its transition shifted
/// by +peak_stark_shift * s, so the pulse is resonant with atoms whose Stark
/// fraction equals microwave_detuning / peak_stark_shift. A positive detuning
/// has the same sign as the Stark shift and targets eta = 1 - detuning/stark.
struct PulseSpec {
  double rabi_frequency = angular_from_hz(2.04e3);  ///< Omega_m [rad/s]
  double microwave_detuning = 0.0;                   ///< delta_m [rad/s]
  double peak_stark_shift = angular_from_hz(32.7e3); ///< delta_s [rad/s]

  void validate() const;
  /// pi / Omega_m
  double duration() const;
  /// eta_c = delta_m / delta_s; the resonant Stark fraction.
  double resonant_fraction() const;
  /// Omega_m / delta_s (infinite when the Stark beam is off).
  double window_width() const;
};

struct SelectionSequence {
  std::vector<PulseSpec> pulses;
  bool repump_between = true;
  /// Probability that a spin-up atom survives the blow-away pulse.
  double blow_away_survival = 0.0;
  /// Probability that an atom is lost during each repump.
  double repump_loss = 0.0;

  void validate() const;
};

/// Spin-flip probability of a square pi-pulse (duration pi/Omega) at
/// detuning Delta: Omega^2/(Omega^2+Delta^2) sin^2(pi/2 sqrt(Omega^2+Delta^2)/Omega).
double rabi_flip_probability(double rabi, double detuning);

/// Selection window F(eta_c, eta, Omega_m, delta_s) with detuning
/// (eta_c - eta) * delta_s. Throws InvalidArgument for rabi <= 0 or stark < 0.
double transfer_probability(double eta_c, double eta, double rabi, double stark);

/// Flip probability for an atom with the given Stark fraction.
double pulse_flip_probability(const PulseSpec& pulse, double stark_fraction);

// Particle pipeline. Random draws are keyed by (seed, pulse index, atom index).

AtomEnsemble apply_pulse(const AtomEnsemble& ens, const PulseSpec& pulse,
                         const CavityGeometry& geo, std::uint64_t seed,
                         std::size_t pulse_index = 0);

/// Removes spin-up atoms; each survives with probability `survival`.
AtomEnsemble blow_away(const AtomEnsemble& ens, double survival = 0.0,
                       std::uint64_t seed = 0, std::size_t pulse_index = 0);

/// Returns all retained atoms to spin up; each is lost with probability `loss`.
AtomEnsemble repump(const AtomEnsemble& ens, double loss = 0.0, std::uint64_t seed = 0,
                    std::size_t pulse_index = 0);

/// pulse -> blow-away -> repump for every pulse of the sequence.
AtomEnsemble run_sequence(const AtomEnsemble& ens, const SelectionSequence& seq,
                          const CavityGeometry& geo, std::uint64_t seed);

// Density pipeline.

inline constexpr double default_selection_floor = 1e-9;

struct DensitySelection {
  CouplingDensity density;
  double retained_fraction = 0.0;
};

/// Survival weight of one selection round for an atom with Stark fraction s.
double round_survival(const PulseSpec& pulse, const SelectionSequence& seq, double s);

/// Reweights `prior` by the survival probability of every round. Throws
/// DegenerateSelection when the retained fraction drops below `floor`.
DensitySelection select_density(const CouplingDensity& prior, const SelectionSequence& seq,
                                double floor = default_selection_floor);

}  // namespace sitesel
