#include "sitesel/spectroscopy.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "quadrature.hpp"
#include "sitesel/errors.hpp"
#include "sitesel/rng.hpp"
#include "sitesel/selection.hpp"

namespace sitesel {

namespace {

constexpr std::uint64_t kFluorescenceStream = stream_id("spectroscopy/fluorescence");

// Integral over t in (-inf, inf) of sin^2(pi/2 sqrt(1+t^2)) / (1+t^2).
double unit_window_area() {
  static const double area = [] {
    constexpr double cutoff = 4096.0;
    const double core = detail::gauss_legendre(0.0, cutoff, 32768, [](double t) {
      const double g2 = 1.0 + t * t;
      const double s = std::sin(0.5 * pi * std::sqrt(g2));
      return s * s / g2;
    });
    // Beyond the cutoff sin^2 averages to 1/2 against a 1/t^2 envelope.
    return 2.0 * core + 1.0 / cutoff;
  }();
  return area;
}

std::vector<double> cell_widths(const std::vector<double>& eta, double lo, double hi) {
  const std::size_t n = eta.size();
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i == 0 ? (n > 1 ? eta[0] - 0.5 * (eta[1] - eta[0]) : lo)
                               : 0.5 * (eta[i - 1] + eta[i]);
    const double right = i + 1 == n ? (n > 1 ? eta[i] + 0.5 * (eta[i] - eta[i - 1]) : hi)
                                    : 0.5 * (eta[i] + eta[i + 1]);
    w[i] = std::min(right, hi) - std::max(left, lo);
  }
  return w;
}

double slope(const std::vector<FluorescencePoint>& pts, bool intercept) {
  const double n = static_cast<double>(pts.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& p : pts) {
    sx += p.cavity_shift;
    sy += p.counts;
    sxx += p.cavity_shift * p.cavity_shift;
    sxy += p.cavity_shift * p.counts;
  }
  if (!intercept) {
    if (!(sxx > 0.0)) throw FitError("fluorescence points have zero cavity shift");
    return sxy / sxx;
  }
  const double det = n * sxx - sx * sx;
  if (!(std::abs(det) > 0.0)) throw FitError("degenerate fluorescence grid");
  return (n * sxy - sx * sy) / det;
}

}  // namespace

void Spectrum::validate() const {
  if (detuning.size() != cavity_shift.size())
    throw InvalidArgument("spectrum grids have different lengths");
  const double cap = atom_count * single_atom_shift;
  const double tol = 1e-9 * std::max(1.0, std::abs(cap));
  for (double s : cavity_shift) {
    if (!(s >= -tol)) throw InvalidArgument("negative cavity shift in spectrum");
    if (s > cap + tol) throw InvalidArgument("cavity shift exceeds N times the single-atom shift");
  }
}

Spectrum synthesize_spectrum(const CouplingDensity& density, double probe_rabi,
                             double peak_stark, std::span<const double> detunings,
                             double atom_count, double single_atom_shift) {
  if (!(probe_rabi > 0.0)) throw InvalidArgument("probe Rabi frequency must be positive");
  if (!(peak_stark >= 0.0)) throw InvalidArgument("peak Stark shift must be non-negative");
  if (!(atom_count >= 0.0)) throw InvalidArgument("atom count must be non-negative");
  const double norm = density.mass();
  if (!(norm > 0.0)) throw InvalidArgument("density carries no mass");

  Spectrum out;
  out.detuning.assign(detunings.begin(), detunings.end());
  out.cavity_shift.resize(detunings.size());
  out.probe_rabi = probe_rabi;
  out.peak_stark = peak_stark;
  out.atom_count = atom_count;
  out.single_atom_shift = single_atom_shift;

  const double width = peak_stark > 0.0 ? probe_rabi / peak_stark : 1.0;
  for (std::size_t i = 0; i < detunings.size(); ++i) {
    if (atom_count == 0.0) {
      out.cavity_shift[i] = 0.0;
      continue;
    }
    PulseSpec pulse{probe_rabi, detunings[i], peak_stark};
    const auto windowed = density.with_factor(
        [pulse](double, double s) { return pulse_flip_probability(pulse, s); }, width);
    const double coupled = windowed.integrate([](double eta, double) { return eta; });
    out.cavity_shift[i] = atom_count * single_atom_shift * coupled / norm;
  }
  return out;
}

std::vector<double> detuning_grid(double peak_stark, std::size_t points, double lo, double hi) {
  if (points < 2) throw InvalidArgument("detuning grid needs at least two points");
  if (!(hi > lo)) throw InvalidArgument("detuning grid needs hi > lo");
  std::vector<double> out(points);
  for (std::size_t i = 0; i < points; ++i)
    out[i] = peak_stark * (lo + (hi - lo) * static_cast<double>(i) /
                                    static_cast<double>(points - 1));
  return out;
}

double window_area(double probe_rabi, double peak_stark) {
  if (!(probe_rabi > 0.0) || !(peak_stark > 0.0))
    throw InvalidArgument("window area needs positive Rabi frequency and Stark shift");
  return probe_rabi / peak_stark * unit_window_area();
}

double DiscreteDensity::area() const {
  double a = 0.0;
  for (std::size_t i = 0; i < weight.size(); ++i) a += weight[i] * cell_width[i];
  return a;
}

double DiscreteDensity::mean() const {
  double m0 = 0.0, m1 = 0.0;
  for (std::size_t i = 0; i < weight.size(); ++i) {
    m0 += weight[i] * cell_width[i];
    m1 += weight[i] * cell_width[i] * eta[i];
  }
  return m1 / m0;
}

double DiscreteDensity::fractional_spread() const {
  double m0 = 0.0, m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < weight.size(); ++i) {
    const double w = weight[i] * cell_width[i];
    m0 += w;
    m1 += w * eta[i];
    m2 += w * eta[i] * eta[i];
  }
  const double mean = m1 / m0;
  return std::sqrt(std::max(0.0, m2 / m0 - mean * mean)) / mean;
}

DiscreteDensity invert_spectrum(const Spectrum& spectrum, double truncation_lo,
                                double truncation_hi) {
  if (!(spectrum.peak_stark > 0.0))
    throw InvalidArgument("inversion needs a nonzero peak Stark shift");
  if (!(spectrum.probe_rabi > 0.0)) throw InvalidArgument("probe Rabi frequency must be positive");
  if (!(truncation_lo >= 0.0 && truncation_hi <= 1.0 && truncation_hi > truncation_lo))
    throw InvalidArgument("truncation range must satisfy 0 <= lo < hi <= 1");
  if (spectrum.detuning.size() != spectrum.cavity_shift.size())
    throw InvalidArgument("spectrum grids have different lengths");
  const double scale = spectrum.atom_count * spectrum.single_atom_shift *
                       window_area(spectrum.probe_rabi, spectrum.peak_stark);
  if (!(scale > 0.0)) throw InversionError("spectrum has no atoms or zero single-atom shift");

  std::vector<std::pair<double, double>> pts;  // (eta, shift)
  for (std::size_t i = 0; i < spectrum.detuning.size(); ++i) {
    const double eta = 1.0 - spectrum.detuning[i] / spectrum.peak_stark;
    if (eta > truncation_lo && eta <= truncation_hi)
      pts.emplace_back(eta, spectrum.cavity_shift[i]);
  }
  if (pts.empty()) throw InversionError("no spectrum points inside the truncation range");
  std::sort(pts.begin(), pts.end());

  DiscreteDensity out;
  out.truncation_lo = truncation_lo;
  out.truncation_hi = truncation_hi;
  for (const auto& [eta, shift] : pts) {
    out.eta.push_back(eta);
    out.raw_weight.push_back(std::max(0.0, shift) / (eta * scale));
  }
  out.cell_width = cell_widths(out.eta, truncation_lo, truncation_hi);
  double area = 0.0;
  for (std::size_t i = 0; i < out.eta.size(); ++i) area += out.raw_weight[i] * out.cell_width[i];
  if (!(area > 0.0)) throw InversionError("spectrum carries no weight inside the truncation range");
  out.weight.resize(out.eta.size());
  for (std::size_t i = 0; i < out.eta.size(); ++i) out.weight[i] = out.raw_weight[i] / area;
  return out;
}

double inversion_l1_error(const DiscreteDensity& recovered, const CouplingDensity& truth) {
  const double lo = recovered.truncation_lo;
  const double hi = recovered.truncation_hi;
  const double mass = truth.cdf(hi) - truth.cdf(lo);
  if (!(mass > 0.0)) throw InvalidArgument("reference density has no mass in the range");
  double l1 = 0.0;
  double left = lo;
  for (std::size_t i = 0; i < recovered.eta.size(); ++i) {
    const double right = std::min(hi, left + recovered.cell_width[i]);
    const double width = right - left;
    if (width > 0.0) {
      const double exact = (truth.cdf(right) - truth.cdf(left)) / mass / width;
      l1 += std::abs(recovered.weight[i] - exact) * width;
    }
    left = right;
  }
  return l1;
}

FluorescenceResult simulate_fluorescence_slopes(const AtomEnsemble& selected,
                                                const AtomEnsemble& unselected,
                                                const CavityGeometry& geo,
                                                const FluorescenceOptions& opts) {
  if (opts.atom_count_grid.size() < 2) throw FitError("fluorescence grid needs two or more points");
  if (opts.relative_noise < 0.0) throw InvalidArgument("relative noise must be non-negative");
  const double dw0 = geo.single_atom_shift();

  auto series = [&](const AtomEnsemble& ens, std::uint64_t which) {
    const std::vector<double> eta = ens.retained_eta(geo);
    if (eta.empty()) throw EmptyEnsemble("fluorescence needs a nonempty ensemble");
    std::vector<FluorescencePoint> pts;
    for (std::size_t k = 0; k < opts.atom_count_grid.size(); ++k) {
      const double f = opts.atom_count_grid[k];
      if (!(f > 0.0 && f <= 1.0)) throw InvalidArgument("atom-count scale factors must be in (0, 1]");
      const auto n = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::llround(f * static_cast<double>(eta.size()))));
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) sum += eta[i];
      double counts = opts.counts_per_atom * static_cast<double>(n);
      if (opts.relative_noise > 0.0) {
        auto engine = make_engine(opts.seed, kFluorescenceStream, which, k);
        std::normal_distribution<double> noise(0.0, opts.relative_noise);
        counts *= 1.0 + noise(engine);
      }
      pts.push_back({dw0 * sum, counts});
    }
    return pts;
  };

  FluorescenceResult r;
  r.unselected = series(unselected, 0);
  r.selected = series(selected, 1);
  r.slope_unselected = slope(r.unselected, opts.fit_intercept);
  r.slope_selected = slope(r.selected, opts.fit_intercept);
  if (!(r.slope_selected > 0.0)) throw FitError("selected fluorescence slope is not positive");
  r.mean_coupling_estimate = r.slope_unselected / (2.0 * r.slope_selected);
  return r;
}

}  // namespace sitesel
