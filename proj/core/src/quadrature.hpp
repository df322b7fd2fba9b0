#pragma once

#include <array>

namespace sitesel::detail {

// 8-point Gauss-Legendre rule on [-1, 1].
inline constexpr std::array<double, 8> gl8_nodes = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
    -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
    0.7966664774136267,  0.9602898564975363};
inline constexpr std::array<double, 8> gl8_weights = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
    0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
    0.2223810344533745, 0.1012285362903763};

/// Composite 8-point Gauss-Legendre over [a, b] with `panels` equal panels.
template <class Fn>
double gauss_legendre(double a, double b, long panels, Fn&& f) {
  if (!(b > a) || panels < 1) return 0.0;
  const double h = (b - a) / static_cast<double>(panels);
  double total = 0.0;
  for (long p = 0; p < panels; ++p) {
    const double mid = a + (static_cast<double>(p) + 0.5) * h;
    double panel = 0.0;
    for (std::size_t k = 0; k < gl8_nodes.size(); ++k)
      panel += gl8_weights[k] * f(mid + 0.5 * h * gl8_nodes[k]);
    total += 0.5 * h * panel;
  }
  return total;
}

}  // namespace sitesel::detail
