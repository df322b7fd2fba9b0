#include "sitesel/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sitesel/errors.hpp"
#include "sitesel/rng.hpp"

namespace sitesel {

namespace {

constexpr std::uint64_t kBootstrapStream = stream_id("statistics/bootstrap");

struct MeanSpread {
  double mean;
  double spread;
};

MeanSpread mean_spread(double m0, double m1, double m2) {
  const double mean = m1 / m0;
  const double var = std::max(0.0, m2 / m0 - mean * mean);
  return {mean, mean > 0.0 ? std::sqrt(var) / mean : 0.0};
}

double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

CouplingStats compute_stats(const CouplingDensity& density) {
  const auto m = density.raw_moments();
  if (!(m.m0 > 0.0)) throw EmptyEnsemble("density carries no mass");
  CouplingStats s;
  s.mean_coupling = m.mean;
  s.fractional_spread = m.mean > 0.0 ? std::sqrt(m.variance) / m.mean : 0.0;
  s.retained_fraction = m.m0;
  return s;
}

CouplingStats compute_stats(const AtomEnsemble& ens, const CavityGeometry& geo,
                            std::uint64_t seed, std::size_t resamples) {
  const std::vector<double> eta = ens.retained_eta(geo);
  if (eta.empty()) throw EmptyEnsemble("no retained atoms");
  const double n = static_cast<double>(eta.size());

  double m1 = 0.0;
  double m2 = 0.0;
  for (double e : eta) {
    m1 += e;
    m2 += e * e;
  }
  const auto ms = mean_spread(n, m1, m2);

  CouplingStats s;
  s.mean_coupling = ms.mean;
  s.fractional_spread = ms.spread;
  s.n_retained = eta.size();
  const double loaded = static_cast<double>(std::max<std::size_t>(ens.loaded, eta.size()));
  s.retained_fraction = n / loaded;
  s.fraction_error = std::sqrt(s.retained_fraction * (1.0 - s.retained_fraction) / loaded);

  if (resamples > 1 && eta.size() > 1) {
    std::vector<double> means;
    std::vector<double> spreads;
    means.reserve(resamples);
    spreads.reserve(resamples);
    for (std::size_t r = 0; r < resamples; ++r) {
      auto engine = make_engine(seed, kBootstrapStream, r);
      std::uniform_int_distribution<std::size_t> pick(0, eta.size() - 1);
      double b1 = 0.0;
      double b2 = 0.0;
      for (std::size_t i = 0; i < eta.size(); ++i) {
        const double e = eta[pick(engine)];
        b1 += e;
        b2 += e * e;
      }
      const auto b = mean_spread(n, b1, b2);
      means.push_back(b.mean);
      spreads.push_back(b.spread);
    }
    s.mean_error = stddev(means);
    s.spread_error = stddev(spreads);
  }
  return s;
}

std::vector<TradeoffPoint> tradeoff_curve(const SelectionSequence& seq_template,
                                          std::span<const double> ratio_grid,
                                          double microwave_detuning) {
  seq_template.validate();
  if (ratio_grid.empty()) throw InvalidArgument("ratio grid is empty");
  const PulseSpec& first = seq_template.pulses.front();
  if (!(first.peak_stark_shift > 0.0))
    throw InvalidArgument("trade-off sweeps need a nonzero peak Stark shift");

  std::vector<TradeoffPoint> out(ratio_grid.size());
  const auto prior = CouplingDensity::arcsine();
  for (std::size_t i = 0; i < ratio_grid.size(); ++i) {
    const double ratio = ratio_grid[i];
    if (!(ratio > 0.0) || !std::isfinite(ratio))
      throw InvalidArgument("Rabi-to-Stark ratios must be positive");
    SelectionSequence seq = seq_template;
    for (auto& p : seq.pulses) {
      const double rel = p.rabi_frequency / first.rabi_frequency;
      p.rabi_frequency = ratio * rel * p.peak_stark_shift;
      p.microwave_detuning = microwave_detuning;
    }
    const auto sel = select_density(prior, seq);
    const auto st = compute_stats(sel.density);
    out[i] = {ratio, sel.retained_fraction, st.mean_coupling, st.fractional_spread};
  }
  return out;
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi >= lo) || count < 1)
    throw InvalidArgument("log grid needs 0 < lo <= hi and at least one point");
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  out.back() = hi;
  return out;
}

std::vector<double> default_ratio_grid() { return log_grid(1e-6, 0.5, 60); }

PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y,
                          FitRange range, std::span<const double> weights) {
  if (x.size() != y.size()) throw FitError("x and y have different lengths");
  if (!weights.empty() && weights.size() != x.size())
    throw FitError("weights and points have different lengths");
  if (!(range.lo > 0.0) || !(range.hi > range.lo)) throw FitError("invalid fit range");

  double sw = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t used = 0;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] >= range.lo && x[i] <= range.hi)) continue;
    if (!(y[i] > 0.0)) {
      std::ostringstream msg;
      msg << "nonpositive value " << y[i] << " at x = " << x[i] << " inside the fit range";
      throw FitError(msg.str());
    }
    const double w = weights.empty() ? 1.0 : weights[i];
    if (!(w > 0.0)) continue;
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sw += w;
    sx += w * lx;
    sy += w * ly;
    sxx += w * lx * lx;
    sxy += w * lx * ly;
    pts.emplace_back(lx, ly);
    ++used;
  }
  if (used < 3) {
    std::ostringstream msg;
    msg << "power-law fit needs at least 3 points in [" << range.lo << ", " << range.hi
        << "], found " << used;
    throw FitError(msg.str());
  }
  const double det = sw * sxx - sx * sx;
  if (!(std::abs(det) > 0.0)) throw FitError("degenerate abscissae in power-law fit");
  const double slope = (sw * sxy - sx * sy) / det;
  const double intercept = (sy - slope * sx) / sw;

  double ss = 0.0;
  for (const auto& [lx, ly] : pts) {
    const double r = ly - (intercept + slope * lx);
    ss += r * r;
  }
  PowerLawFit fit;
  fit.prefactor = std::exp(intercept);
  fit.exponent = slope;
  fit.range = range;
  fit.residual_norm = std::sqrt(ss / static_cast<double>(used));
  fit.points = used;
  return fit;
}

}  // namespace sitesel
