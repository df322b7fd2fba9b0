#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sitesel/cavity_field.hpp"
#include "sitesel/selection.hpp"

namespace sitesel {

struct CouplingStats {
  double mean_coupling = 0.0;      ///< eta-bar
  double fractional_spread = 0.0;  ///< sqrt(<eta^2> - eta-bar^2) / eta-bar
  double retained_fraction = 0.0;  ///< N_s / N
  std::size_t n_retained = 0;      ///< 0 for density inputs
  // Standard errors; zero for the deterministic density pipeline.
  double mean_error = 0.0;
  double spread_error = 0.0;
  double fraction_error = 0.0;
};

inline constexpr std::size_t default_bootstrap_resamples = 200;

/// Deterministic statistics of a (possibly selected) density. The retained
/// fraction is the density's mass.
CouplingStats compute_stats(const CouplingDensity& density);

/// Statistics of the retained atoms with bootstrap standard errors for the
/// mean and spread and a binomial error for the retained fraction.
CouplingStats compute_stats(const AtomEnsemble& ens, const CavityGeometry& geo,
                            std::uint64_t seed = 0,
                            std::size_t resamples = default_bootstrap_resamples);

struct TradeoffPoint {
  double ratio = 0.0;  ///< Omega_m / delta_s of the first pulse
  double retained_fraction = 0.0;
  double mean_coupling = 0.0;
  double fractional_spread = 0.0;
};

/// Sweeps Omega_m/delta_s. Every pulse of the template keeps its Rabi
/// frequency relative to the first pulse and its peak Stark shift; all
/// pulses get the given microwave detuning. Points are independent and are
/// returned in grid order.
std::vector<TradeoffPoint> tradeoff_curve(const SelectionSequence& seq_template,
                                          std::span<const double> ratio_grid,
                                          double microwave_detuning);

/// `count` log-spaced values from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, std::size_t count);

/// Default sweep: reaches N_s/N ~ 1e-3 for a single delta_m = 0 pulse so the
/// default fit window is populated.
std::vector<double> default_ratio_grid();

struct FitRange {
  double lo = 1e-3;
  double hi = 0.1;
};

struct PowerLawFit {
  double prefactor = 0.0;  ///< A
  double exponent = 0.0;   ///< alpha
  FitRange range;
  double residual_norm = 0.0;  ///< RMS residual in log space
  std::size_t points = 0;
};

/// Least-squares line through (log x, log y) for the points with x inside
/// `range`, giving y = A x^alpha. Optional per-point weights; unweighted by
/// default. Throws FitError with fewer than 3 usable points or y <= 0 in range.
PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y,
                          FitRange range = {}, std::span<const double> weights = {});

}  // namespace sitesel
