#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sitesel/cavity_field.hpp"

namespace sitesel {

/// Dressed-cavity shift after a spectroscopy pi-pulse, as a function of
/// microwave detuning. All frequencies in rad/s.
struct Spectrum {
  std::vector<double> detuning;
  std::vector<double> cavity_shift;
  double probe_rabi = 0.0;
  double peak_stark = 0.0;
  double atom_count = 0.0;
  double single_atom_shift = 0.0;

  /// Equal lengths, 0 <= shift <= atom_count * single_atom_shift.
  void validate() const;
};

/// delta_omega_c(delta_m) = N dw0 * integral of eta P(eta) F(delta_m / delta_s, s) over the
/// normalized density P. Throws InvalidArgument for probe_rabi <= 0.
Spectrum synthesize_spectrum(const CouplingDensity& density, double probe_rabi,
                             double peak_stark, std::span<const double> detunings,
                             double atom_count, double single_atom_shift);

/// `points` detunings evenly spaced over [lo, hi] * peak_stark.
std::vector<double> detuning_grid(double peak_stark, std::size_t points = 201, double lo = -0.2,
                                  double hi = 1.2);

/// Integral of the pi-pulse window over detuning, in units of the peak Stark
/// shift: the area of F(eta_c, eta) over eta_c. Approaches ~2.117 Omega/delta_s
/// for a narrow window.
double window_area(double probe_rabi, double peak_stark);

struct DiscreteDensity {
  std::vector<double> eta;     ///< ascending, inside the truncation range
  std::vector<double> weight;  ///< normalized to unit area over the range
  /// Weights before renormalization: shift / (eta N dw0 W).
  std::vector<double> raw_weight;
  /// Width of the eta cell represented by each point.
  std::vector<double> cell_width;
  double truncation_lo = 0.4;
  double truncation_hi = 1.0;

  /// Sum of weight * cell_width (1 by construction).
  double area() const;
  double mean() const;
  double fractional_spread() const;
};

/// Delta-window inversion: eta = 1 - delta_m / delta_s, divide by eta and by
/// the window area, keep truncation_lo < eta <= truncation_hi, renormalize.
/// Throws InversionError when nothing usable remains.
DiscreteDensity invert_spectrum(const Spectrum& spectrum, double truncation_lo = 0.4,
                                double truncation_hi = 1.0);

/// L1 distance between an inverted density and the exact density restricted
/// to the same truncation range, using exact cell averages of the latter.
double inversion_l1_error(const DiscreteDensity& recovered, const CouplingDensity& truth);

struct FluorescenceOptions {
  /// Atom-number scale factors applied to each ensemble.
  std::vector<double> atom_count_grid = {0.2, 0.4, 0.6, 0.8, 1.0};
  /// Fluorescence counts per detected atom.
  double counts_per_atom = 1.0;
  /// Relative Gaussian noise on each count; 0 disables noise.
  double relative_noise = 0.01;
  bool fit_intercept = false;
  std::uint64_t seed = 0;
};

struct FluorescencePoint {
  double cavity_shift = 0.0;  ///< rad/s
  double counts = 0.0;
};

struct FluorescenceResult {
  std::vector<FluorescencePoint> unselected;
  std::vector<FluorescencePoint> selected;
  double slope_unselected = 0.0;  ///< counts per (rad/s)
  double slope_selected = 0.0;
  double mean_coupling_estimate = 0.0;  ///< a_u / (2 a_s)
};

/// Slope of counts against cavity shift for each ensemble; the unselected
/// ensemble is assumed to have mean coupling 1/2.
FluorescenceResult simulate_fluorescence_slopes(const AtomEnsemble& selected,
                                                const AtomEnsemble& unselected,
                                                const CavityGeometry& geo,
                                                const FluorescenceOptions& opts = {});

}  // namespace sitesel
