#pragma once

// Reference calculations that share no code with the library.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

// Excited-state population after a square pulse of length pi/rabi, found by
// integrating the two-level Schroedinger equation with fixed-step RK4.
// H = (detuning/2) sz + (rabi/2) sx, starting in the ground state.
inline double rk4_flip(double rabi, double detuning, int steps = 4000) {
  using C = std::complex<double>;
  const C I(0.0, 1.0);
  auto deriv = [&](C g, C e, C& dg, C& de) {
    dg = -I * (-0.5 * detuning * g + 0.5 * rabi * e);
    de = -I * (0.5 * rabi * g + 0.5 * detuning * e);
  };
  const double t = std::numbers::pi / rabi;
  const double h = t / steps;
  C g = 1.0, e = 0.0;
  for (int i = 0; i < steps; ++i) {
    C k1g, k1e, k2g, k2e, k3g, k3e, k4g, k4e;
    deriv(g, e, k1g, k1e);
    deriv(g + 0.5 * h * k1g, e + 0.5 * h * k1e, k2g, k2e);
    deriv(g + 0.5 * h * k2g, e + 0.5 * h * k2e, k3g, k3e);
    deriv(g + h * k3g, e + h * k3e, k4g, k4e);
    g += h / 6.0 * (k1g + 2.0 * k2g + 2.0 * k3g + k4g);
    e += h / 6.0 * (k1e + 2.0 * k2e + 2.0 * k3e + k4e);
  }
  return std::norm(e);
}

inline double arcsine_cdf(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return 2.0 / std::numbers::pi * std::asin(std::sqrt(x));
}

// Two-sided Kolmogorov-Smirnov distance of a sample against a continuous CDF.
inline double ks_distance(std::vector<double> x, const std::function<double(double)>& cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

// Adaptive Simpson on [a, b].
inline double simpson(const std::function<double(double)>& f, double a, double b, double tol,
                      int depth = 40) {
  std::function<double(double, double, double, double, double, double, double, int)> rec =
      [&](double a, double b, double fa, double fm, double fb, double whole, double tol,
          int depth) {
        const double m = 0.5 * (a + b);
        const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
        const double flm = f(lm), frm = f(rm);
        const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
          return left + right + (left + right - whole) / 15.0;
        return rec(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
               rec(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
      };
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return rec(a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, depth);
}

// Golden-section minimum of f on [a, b].
inline double golden_min(const std::function<double(double)>& f, double a, double b,
                         double tol) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// Straight-line least squares through (log x, log y): returns {A, alpha}.
inline std::pair<double, double> loglog_fit(const std::vector<double>& x,
                                            const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {std::exp((sy - slope * sx) / n), slope};
}

}  // namespace oracle
