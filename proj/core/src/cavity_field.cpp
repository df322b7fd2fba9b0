#include "sitesel/cavity_field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <utility>

#include "quadrature.hpp"
#include "sitesel/errors.hpp"
#include "sitesel/rng.hpp"

namespace sitesel {

namespace {

double square(double x) { return x * x; }

constexpr std::uint64_t kEnsembleStream = stream_id("cavity-field/ensemble");

// Quadrature panels are never wider than this fraction of the phase range.
constexpr double kBasePanelsPerRange = 1024.0;
// Hard cap; protects against runaway cost from absurdly narrow windows.
constexpr double kMaxPanels = 4.0e8;

}  // namespace

// --------------------------------------------------------------------------
// Geometry

void CavityGeometry::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw InvalidArgument(std::string(name) + " must be positive and finite");
  };
  positive(lattice_wavelength, "lattice_wavelength");
  positive(probe_wavelength, "probe_wavelength");
  positive(atomic_wavelength, "atomic_wavelength");
  positive(free_spectral_range_hz, "free_spectral_range");
  positive(hyperfine_splitting_hz, "hyperfine_splitting");
  positive(probe_detuning, "probe_detuning");
  positive(peak_coupling, "peak_coupling");
  positive(mode_waist, "mode_waist");
  if (!std::isfinite(stark_detuning))
    throw InvalidArgument("stark_detuning must be finite");
  const double ls = stark_wavelength();
  if (!(ls > 0.0) || !std::isfinite(ls))
    throw InvalidArgument("free spectral range too large for the probe wavelength");
  if (lattice_wavelength == probe_wavelength)
    throw InvalidArgument("lattice and probe wavelengths must differ");
}

double CavityGeometry::stark_wavelength() const {
  const double sign = stark_sign == StarkModeSign::plus ? 1.0 : -1.0;
  return 1.0 / (1.0 / probe_wavelength + sign * free_spectral_range_hz / speed_of_light);
}

double CavityGeometry::cavity_length() const {
  return speed_of_light / (2.0 * free_spectral_range_hz);
}

double CavityGeometry::differential_wavelength() const {
  return 1.0 / std::abs(1.0 / lattice_wavelength - 1.0 / probe_wavelength);
}

double CavityGeometry::single_atom_shift() const {
  return square(peak_coupling) / probe_detuning;
}

double coupling_eta(double z, const CavityGeometry& geo) {
  const double phase = two_pi * z / geo.probe_wavelength;
  return geo.symmetry == ModeSymmetry::probe_antinode ? square(std::cos(phase))
                                                      : square(std::sin(phase));
}

double stark_fraction(double z, const CavityGeometry& geo) {
  const double phase = two_pi * z / geo.stark_wavelength();
  return geo.symmetry == ModeSymmetry::probe_antinode ? square(std::sin(phase))
                                                      : square(std::cos(phase));
}

double stark_shift(double z, double peak_stark, const CavityGeometry& geo) {
  return peak_stark * stark_fraction(z, geo);
}

double intensity_phase_slip(double z, const CavityGeometry& geo) {
  return 4.0 * pi * z * (1.0 / geo.stark_wavelength() - 1.0 / geo.probe_wavelength);
}

double anti_alignment_error(double z, const CavityGeometry& geo) {
  return std::abs(coupling_eta(z, geo) + stark_fraction(z, geo) - 1.0);
}

// --------------------------------------------------------------------------
// Particles

std::size_t AtomEnsemble::count(Spin s) const {
  return static_cast<std::size_t>(
      std::count_if(atoms.begin(), atoms.end(), [s](const Atom& a) { return a.spin == s; }));
}

std::size_t AtomEnsemble::retained() const { return atoms.size() - count(Spin::removed); }

std::vector<double> AtomEnsemble::retained_eta(const CavityGeometry& geo) const {
  std::vector<double> out;
  out.reserve(atoms.size());
  for (const auto& a : atoms)
    if (a.spin != Spin::removed) out.push_back(coupling_eta(a.z, geo));
  return out;
}

AtomEnsemble sample_ensemble(const SampleOptions& opts, const CavityGeometry& geo) {
  geo.validate();
  if (opts.atoms < 1) throw InvalidArgument("ensemble needs at least one atom");
  if (!(opts.extent > 0.0) || !std::isfinite(opts.extent))
    throw InvalidArgument("ensemble extent must be positive");
  if (opts.radial_sigma < 0.0) throw InvalidArgument("radial_sigma must be non-negative");

  AtomEnsemble ens;
  ens.seed = opts.seed;
  ens.loaded = opts.atoms;
  if (opts.extent < arcsine_extent_ratio * geo.differential_wavelength()) {
    std::ostringstream msg;
    msg << "ensemble extent " << opts.extent << " m is below " << arcsine_extent_ratio
        << " differential wavelengths; the loaded coupling density will deviate from "
           "the arcsine law";
    ens.warnings.push_back(msg.str());
  }

  const double site = 0.5 * geo.lattice_wavelength;
  const double lo = std::ceil((opts.z_offset - 0.5 * opts.extent) / site);
  const double hi = std::floor((opts.z_offset + 0.5 * opts.extent) / site);
  const double sigma_sites = 0.25 * opts.extent / site;

  ens.atoms.resize(opts.atoms);
  for (std::size_t i = 0; i < opts.atoms; ++i) {
    auto engine = make_engine(opts.seed, kEnsembleStream, i);
    double m = 0.0;
    if (opts.profile == AxialProfile::uniform) {
      if (hi < lo) {
        m = std::round(opts.z_offset / site);
      } else {
        const double span = hi - lo + 1.0;
        const double u = std::generate_canonical<double, 53>(engine);
        m = lo + std::min(std::floor(u * span), span - 1.0);
      }
    } else {
      std::normal_distribution<double> gauss(opts.z_offset / site, sigma_sites);
      m = std::round(gauss(engine));
    }
    Atom& atom = ens.atoms[i];
    atom.z = m * site;
    if (opts.radial_sigma > 0.0) {
      std::normal_distribution<double> radial(0.0, opts.radial_sigma);
      const double x = radial(engine);
      const double y = radial(engine);
      atom.rho = std::hypot(x, y);
    }
    atom.spin = Spin::up;
  }
  return ens;
}

// --------------------------------------------------------------------------
// Analytic density

double arcsine_pdf(double eta) {
  if (eta <= 0.0 || eta >= 1.0) return std::numeric_limits<double>::infinity();
  return 1.0 / (pi * std::sqrt(eta * (1.0 - eta)));
}

double arcsine_cdf(double eta) {
  if (eta <= 0.0) return 0.0;
  if (eta >= 1.0) return 1.0;
  return 2.0 / pi * std::asin(std::sqrt(eta));
}

CouplingDensity CouplingDensity::arcsine(double phase_slip) {
  if (!std::isfinite(phase_slip)) throw InvalidArgument("phase slip must be finite");
  CouplingDensity d;
  d.kind_ = Kind::phase_uniform;
  d.phase_slip_ = phase_slip;
  return d;
}

CouplingDensity CouplingDensity::from_pdf(std::function<double(double)> pdf) {
  if (!pdf) throw InvalidArgument("empty density function");
  CouplingDensity d;
  d.kind_ = Kind::eta_pdf;
  d.pdf_ = std::move(pdf);
  d.pdf_norm_ = 1.0;
  const double norm = d.integrate_theta(0.0, 0.5 * pi, [](double, double) { return 1.0; });
  if (!(norm > 0.0) || !std::isfinite(norm))
    throw InvalidArgument("density function has no finite positive mass on [0, 1]");
  d.pdf_norm_ = norm;
  return d;
}

CouplingDensity CouplingDensity::point_masses(std::vector<double> etas,
                                              std::vector<double> weights) {
  if (etas.empty() || etas.size() != weights.size())
    throw InvalidArgument("point masses need matching, nonempty eta and weight lists");
  double total = 0.0;
  for (std::size_t i = 0; i < etas.size(); ++i) {
    if (etas[i] < 0.0 || etas[i] > 1.0) throw InvalidArgument("point mass outside [0, 1]");
    if (weights[i] < 0.0) throw InvalidArgument("negative point mass weight");
    total += weights[i];
  }
  if (!(total > 0.0)) throw InvalidArgument("point masses carry no weight");
  for (auto& w : weights) w /= total;
  CouplingDensity d;
  d.kind_ = Kind::discrete;
  d.etas_ = std::move(etas);
  d.weights_ = std::move(weights);
  return d;
}

CouplingDensity CouplingDensity::with_factor(Factor factor, double resolution) const {
  if (!factor) throw InvalidArgument("empty factor");
  if (!(resolution > 0.0)) throw InvalidArgument("factor resolution must be positive");
  CouplingDensity d = *this;
  d.factors_.push_back(std::move(factor));
  d.resolution_ = std::min(resolution_, resolution);
  d.moments_.reset();
  return d;
}

double CouplingDensity::factor_product(double eta, double s) const {
  double w = 1.0;
  for (const auto& f : factors_) {
    w *= f(eta, s);
    if (w == 0.0) break;
  }
  return w;
}

double CouplingDensity::theta_max() const {
  return (kind_ == Kind::phase_uniform && phase_slip_ != 0.0) ? pi : 0.5 * pi;
}

template <class Visitor>
void CouplingDensity::visit_nodes(double a, double b, Visitor&& visit) const {
  if (kind_ == Kind::discrete) {
    for (std::size_t i = 0; i < etas_.size(); ++i) {
      const double eta = etas_[i];
      const double theta = std::acos(std::sqrt(eta));
      if (theta < a || theta > b) continue;
      const double s = 1.0 - eta;
      visit(eta, s, weights_[i] * factor_product(eta, s));
    }
    return;
  }
  if (!(b > a)) return;
  const double range = theta_max();
  // GL8 resolves one full window oscillation per panel to ~1e-12.
  const double h = std::min(range / kBasePanelsPerRange, 2.0 * resolution_);
  const double panels_real = std::ceil((b - a) / h);
  if (panels_real > kMaxPanels)
    throw NumericError("selection window too narrow for the density quadrature");
  const long panels = std::max(1L, static_cast<long>(panels_real));
  const double width = (b - a) / static_cast<double>(panels);
  const bool phase_kind = kind_ == Kind::phase_uniform;
  for (long p = 0; p < panels; ++p) {
    const double mid = a + (static_cast<double>(p) + 0.5) * width;
    for (std::size_t k = 0; k < detail::gl8_nodes.size(); ++k) {
      const double theta = mid + 0.5 * width * detail::gl8_nodes[k];
      const double c = std::cos(theta);
      const double eta = c * c;
      double s;
      double w = 0.5 * width * detail::gl8_weights[k];
      if (phase_kind) {
        const double st = std::sin(theta + phase_slip_);
        s = st * st;
        w /= range;
      } else {
        s = 1.0 - eta;
        w *= pdf_(eta) * std::sin(2.0 * theta) / pdf_norm_;
      }
      if (w == 0.0) continue;
      visit(eta, s, w * factor_product(eta, s));
    }
  }
}

double CouplingDensity::integrate_theta(double a, double b,
                                        const std::function<double(double, double)>& f) const {
  double total = 0.0;
  visit_nodes(a, b, [&](double eta, double s, double w) {
    if (w != 0.0) total += w * f(eta, s);
  });
  return total;
}

double CouplingDensity::integrate(const std::function<double(double, double)>& f) const {
  return integrate_theta(0.0, theta_max(), f);
}

CouplingDensity::RawMoments CouplingDensity::raw_moments() const {
  if (moments_) return *moments_;
  RawMoments m;
  visit_nodes(0.0, theta_max(), [&](double eta, double, double w) {
    m.m0 += w;
    m.m1 += w * eta;
    m.m2 += w * eta * eta;
    if (w > 0.0) {
      const double d = eta - m.mean;
      m.mean += d * (w / m.m0);
      m.variance += w * d * (eta - m.mean);
    }
  });
  if (m.m0 > 0.0) m.variance = std::max(0.0, m.variance / m.m0);
  moments_ = m;
  return m;
}

double CouplingDensity::mass() const {
  if (kind_ == Kind::phase_uniform && factors_.empty()) return 1.0;
  return raw_moments().m0;
}

double CouplingDensity::expectation(const std::function<double(double)>& f) const {
  double num = 0.0;
  double den = 0.0;
  visit_nodes(0.0, theta_max(), [&](double eta, double, double w) {
    num += w * f(eta);
    den += w;
  });
  if (!(den > 0.0)) throw InvalidArgument("expectation over a density with zero mass");
  return num / den;
}

double CouplingDensity::unnormalized_cdf(double eta) const {
  if (eta <= 0.0) return 0.0;
  if (eta >= 1.0) return raw_moments().m0;
  if (kind_ == Kind::discrete) {
    double total = 0.0;
    for (std::size_t i = 0; i < etas_.size(); ++i)
      if (etas_[i] <= eta) total += weights_[i] * factor_product(etas_[i], 1.0 - etas_[i]);
    return total;
  }
  // eta(theta) <= x  <=>  theta in [acos(sqrt x), pi - acos(sqrt x)]
  const double tx = std::acos(std::sqrt(eta));
  const double hi = std::min(theta_max(), pi - tx);
  return integrate_theta(tx, hi, [](double, double) { return 1.0; });
}

double CouplingDensity::cdf(double eta) const {
  if (kind_ == Kind::phase_uniform && factors_.empty()) return arcsine_cdf(eta);
  const double total = unnormalized_cdf(1.0);
  if (!(total > 0.0)) throw InvalidArgument("cdf of a density with zero mass");
  return std::clamp(unnormalized_cdf(eta) / total, 0.0, 1.0);
}

double CouplingDensity::pdf(double eta) const {
  if (kind_ == Kind::discrete)
    throw InvalidArgument("pointwise density is undefined for point masses");
  if (phase_slip_ != 0.0)
    throw InvalidArgument("pointwise density needs exact probe/Stark anti-alignment");
  if (eta < 0.0 || eta > 1.0) return 0.0;
  const double prior = kind_ == Kind::phase_uniform ? arcsine_pdf(eta) : pdf_(eta) / pdf_norm_;
  if (factors_.empty()) return prior;
  return prior * factor_product(eta, 1.0 - eta) / mass();
}

std::vector<DensityBin> CouplingDensity::histogram(std::size_t bins) const {
  if (bins < 1) throw InvalidArgument("histogram needs at least one bin");
  std::vector<DensityBin> out(bins);
  std::vector<double> cum(bins + 1, 0.0);
  for (std::size_t i = 1; i <= bins; ++i)
    cum[i] = unnormalized_cdf(static_cast<double>(i) / static_cast<double>(bins));
  const double total = cum[bins];
  if (!(total > 0.0)) throw InvalidArgument("histogram of a density with zero mass");
  const double width = 1.0 / static_cast<double>(bins);
  for (std::size_t i = 0; i < bins; ++i) {
    out[i].eta_lo = static_cast<double>(i) * width;
    out[i].eta_hi = static_cast<double>(i + 1) * width;
    out[i].density = (cum[i + 1] - cum[i]) / total / width;
    out[i].cdf_hi = cum[i + 1] / total;
  }
  return out;
}

}  // namespace sitesel
