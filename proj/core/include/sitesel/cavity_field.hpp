#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sitesel/constants.hpp"

namespace sitesel {

/// Which adjacent longitudinal mode carries the Stark beam:
/// 1/lambda_s = 1/lambda_p + sign * FSR / c.
enum class StarkModeSign { plus, minus };

/// Which mode has its antinode at the cavity mid-plane.
enum class ModeSymmetry { probe_antinode, stark_antinode };

/// Cavity and laser geometry. Lengths in metres, detunings and couplings in
/// rad/s, the free spectral range and hyperfine splitting in Hz.
struct CavityGeometry {
  double lattice_wavelength = 813e-9;
  double probe_wavelength = 780e-9;
  double atomic_wavelength = 780e-9;
  double free_spectral_range_hz = 6.791e9;
  double hyperfine_splitting_hz = 6.834e9;
  double probe_detuning = angular_from_hz(700e6);
  double stark_detuning = angular_from_hz(700e6);
  /// Chosen so that g0^2 / probe_detuning = 2 pi x 150 Hz.
  double peak_coupling = angular_from_hz(std::sqrt(150.0 * 700e6));
  double mode_waist = 71e-6;
  StarkModeSign stark_sign = StarkModeSign::plus;
  ModeSymmetry symmetry = ModeSymmetry::probe_antinode;

  /// Throws InvalidArgument on non-positive lengths or a non-finite
  /// derived Stark wavelength.
  void validate() const;

  double stark_wavelength() const;
  double cavity_length() const;
  /// 1/lambda_d = |1/lambda_l - 1/lambda_p|
  double differential_wavelength() const;
  /// Dispersive shift of the cavity from one maximally coupled atom, g0^2/Delta_p.
  double single_atom_shift() const;
};

/// eta = (g/g0)^2 of a point-like atom at axial position z.
double coupling_eta(double z, const CavityGeometry& geo);

/// Normalized Stark intensity seen at z, in [0, 1].
double stark_fraction(double z, const CavityGeometry& geo);

/// delta(z) = peak_stark * stark_fraction(z).
double stark_shift(double z, double peak_stark, const CavityGeometry& geo);

/// Phase by which the probe and Stark intensity patterns slip relative to
/// each other between the mid-plane and z: 4 pi z FSR / c (signed).
double intensity_phase_slip(double z, const CavityGeometry& geo);

/// |eta(z) + stark_fraction(z) - 1|; zero where the two patterns are exactly
/// anti-aligned.
double anti_alignment_error(double z, const CavityGeometry& geo);

// ---------------------------------------------------------------------------
// Particle representation

enum class Spin : std::uint8_t { up, down, removed };

struct Atom {
  double z = 0.0;    ///< axial position from the mid-plane [m]
  double rho = 0.0;  ///< radial offset from the cavity axis [m]
  Spin spin = Spin::up;
};

struct AtomEnsemble {
  std::vector<Atom> atoms;
  /// Number of atoms originally loaded; denominator of every retained fraction.
  std::size_t loaded = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;

  std::size_t count(Spin s) const;
  /// Atoms not yet removed.
  std::size_t retained() const;
  /// eta of every retained atom, in storage order.
  std::vector<double> retained_eta(const CavityGeometry& geo) const;
};

enum class AxialProfile { uniform, gaussian };

struct SampleOptions {
  std::size_t atoms = 100000;
  /// Full width for the uniform profile; 4 sigma for the Gaussian profile.
  double extent = 1e-3;
  /// Ensemble centre relative to the cavity mid-plane.
  double z_offset = 0.0;
  AxialProfile profile = AxialProfile::uniform;
  /// RMS radial size per transverse axis; 0 puts every atom on axis.
  double radial_sigma = 0.0;
  std::uint64_t seed = 1;
};

/// Loads atoms onto lattice antinodes z = m * lambda_l / 2 over the requested
/// axial profile. Deterministic in (options, geometry).
AtomEnsemble sample_ensemble(const SampleOptions& opts, const CavityGeometry& geo);

/// Ratio below which the loaded eta histogram is not expected to follow the
/// arcsine law.
inline constexpr double arcsine_extent_ratio = 50.0;

// ---------------------------------------------------------------------------
// Analytic representation

/// Arcsine law of eta = cos^2 of a uniformly distributed phase.
double arcsine_pdf(double eta);
double arcsine_cdf(double eta);

struct DensityBin {
  double eta_lo = 0.0;
  double eta_hi = 0.0;
  double density = 0.0;  ///< mean normalized density over the bin
  double cdf_hi = 0.0;   ///< cumulative probability up to eta_hi
};

/// Probability measure over eta, optionally reweighted by selection factors.
///
/// Continuous priors are integrated in the probe phase theta with
/// eta = cos^2(theta), which turns the arcsine law into the uniform measure
/// and removes the endpoint singularities. Each factor is a function of
/// (eta, stark_fraction); the Stark fraction of a node at phase theta is
/// sin^2(theta + phase_slip), i.e. 1 - eta for exact anti-alignment.
///
/// mass() is the integral of the prior times all factors, so for a
/// normalized prior it equals the fraction of atoms retained.
class CouplingDensity {
 public:
  using Factor = std::function<double(double eta, double stark_fraction)>;

  /// Unselected lattice-loaded density; phase_slip shifts the Stark pattern.
  static CouplingDensity arcsine(double phase_slip = 0.0);
  /// Arbitrary prior density over eta in [0, 1]; normalized numerically.
  static CouplingDensity from_pdf(std::function<double(double)> pdf);
  /// Discrete prior; weights are normalized to sum to one.
  static CouplingDensity point_masses(std::vector<double> etas, std::vector<double> weights);

  /// Copy with one more multiplicative factor. `resolution` is the narrowest
  /// feature of the factor in Stark-fraction units; it sets the quadrature
  /// panel width.
  CouplingDensity with_factor(Factor factor, double resolution) const;

  struct RawMoments {
    double m0 = 0.0;  ///< integral of prior * factors
    double m1 = 0.0;  ///< ... times eta
    double m2 = 0.0;  ///< ... times eta^2
    // Normalized mean and variance, accumulated stably; m2/m0 - mean^2
    // cancels badly for tightly selected densities.
    double mean = 0.0;
    double variance = 0.0;
  };

  double mass() const;
  /// Zeroth to second raw moments of eta in a single quadrature pass.
  RawMoments raw_moments() const;
  /// Normalized expectation of f(eta).
  double expectation(const std::function<double(double)>& f) const;
  /// Unnormalized integral of f(eta, s) against prior * factors.
  double integrate(const std::function<double(double, double)>& f) const;
  /// Normalized cumulative distribution.
  double cdf(double eta) const;
  /// Normalized density at eta (continuous priors with zero phase slip).
  double pdf(double eta) const;
  std::vector<DensityBin> histogram(std::size_t bins) const;

  double phase_slip() const { return phase_slip_; }
  double resolution() const { return resolution_; }
  std::size_t factor_count() const { return factors_.size(); }
  bool is_discrete() const { return kind_ == Kind::discrete; }

 private:
  enum class Kind { phase_uniform, eta_pdf, discrete };

  CouplingDensity() = default;

  double factor_product(double eta, double s) const;
  /// Calls visit(eta, s, weight) for every quadrature node with theta in
  /// [a, b]; weight already includes the prior and all factors.
  template <class Visitor>
  void visit_nodes(double a, double b, Visitor&& visit) const;
  /// Integrates over theta in [a, b] (subset of the prior's phase range).
  double integrate_theta(double a, double b,
                         const std::function<double(double, double)>& f) const;
  double theta_max() const;
  double unnormalized_cdf(double eta) const;

  Kind kind_ = Kind::phase_uniform;
  double phase_slip_ = 0.0;
  std::function<double(double)> pdf_;
  double pdf_norm_ = 1.0;
  std::vector<double> etas_;
  std::vector<double> weights_;
  std::vector<Factor> factors_;
  mutable std::optional<RawMoments> moments_;
  double resolution_ = 1.0;
};

}  // namespace sitesel
