#pragma once

// Independent reference computations shared by the unit tests. Everything here
// is deliberately naive: direct sums, explicit loops, no FFT.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include "fracprog/grid.hpp"
#include "fracprog/numerics.hpp"
#include "fracprog/polynomial.hpp"

namespace oracle {

using fracprog::DyadicSet;
using fracprog::GridFunction;

// O(N^2) DFT with the same normalization as fracprog::transform.
inline std::complex<double> dft_coeff(const GridFunction& f, std::int64_t xi) {
  const auto n = static_cast<double>(f.size());
  std::complex<double> s{};
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double ang = -2.0 * std::numbers::pi * static_cast<double>(xi) * static_cast<double>(j) / n;
    s += f[j] * std::complex<double>(std::cos(ang), std::sin(ang));
  }
  return s / n;
}

inline GridFunction sampled(int J, const auto& fn) {
  GridFunction g(J);
  for (std::size_t j = 0; j < g.size(); ++j) g[j] = fn(g.point(j));
  return g;
}

inline GridFunction random_signal(int J, std::uint64_t seed) {
  fracprog::Rng r(seed);
  GridFunction g(J);
  for (std::size_t j = 0; j < g.size(); ++j) g[j] = 2.0 * r.uniform() - 1.0;
  return g;
}

inline DyadicSet random_set(int J, double density, std::uint64_t seed) {
  fracprog::Rng r(seed);
  std::vector<std::uint32_t> cells;
  for (std::uint32_t j = 0; j < (1u << J); ++j)
    if (r.uniform() < density) cells.push_back(j);
  return {J, cells};
}

inline GridFunction half_indicator(int J) {
  GridFunction g(J);
  for (std::size_t j = 0; j < g.size() / 2; ++j) g[j] = 1.0;
  return g;
}

// Left-endpoint cell of (x_j - y), periodized, by direct floor arithmetic in long double.
inline std::size_t torus_cell(std::size_t j, double y, int J) {
  const long double n = std::ldexp(1.0L, J);
  long double p = static_cast<long double>(j) / n - static_cast<long double>(y);
  p -= std::floor(p);
  auto c = static_cast<std::int64_t>(std::floor(p * n));
  if (c >= static_cast<std::int64_t>(n)) c -= static_cast<std::int64_t>(n);
  return static_cast<std::size_t>(c);
}

// (1/|nodes|) sum_q prod_i f_i(x_j - P_i(t_q)) at a single grid point, periodic.
inline double average_at_point(const fracprog::PolynomialFamily& fam, const std::vector<GridFunction>& fs,
                               const std::vector<double>& nodes, std::size_t j) {
  double s = 0.0;
  for (double t : nodes) {
    double prod = 1.0;
    for (std::size_t i = 0; i < fam.size(); ++i) prod *= fs[i][torus_cell(j, fam[i](t), fs[i].resolution())];
    s += prod;
  }
  return s / static_cast<double>(nodes.size());
}

// Fourier transform of the uniform measure on the depth-n cylinders of a base-b
// digit construction: prod_{j<=n} (mean_d e(-eta d / b^j)) * (uniform factor of [0, b^-n)).
inline std::complex<double> digit_measure_hat(double eta, int base, const std::vector<int>& digits, int depth) {
  const double two_pi = 2.0 * std::numbers::pi;
  std::complex<double> prod = 1.0;
  double scale = 1.0;
  for (int j = 1; j <= depth; ++j) {
    scale /= base;
    std::complex<double> s{};
    for (int d : digits) s += std::polar(1.0, -two_pi * eta * d * scale);
    prod *= s / static_cast<double>(digits.size());
  }
  const double a = eta * scale;  // transform of uniform density on [0, scale)
  if (a != 0.0) prod *= (std::polar(1.0, -two_pi * a) - 1.0) / std::complex<double>(0.0, -two_pi * a);
  return prod;
}

// Grid coefficient of the cell-rasterized measure: sum_j mu(cell_j) e(-xi j / N)
//   = sum_k c_k mu_hat(xi - k N),  c_k = (e(xi/N) - 1) / (2 pi i (xi/N - k)),
// truncated symmetrically at |k| <= K.
inline std::complex<double> rasterized_coeff(std::int64_t xi, int J, int base, const std::vector<int>& digits,
                                             int depth, std::int64_t K) {
  const double n = std::ldexp(1.0, J);
  const double two_pi = 2.0 * std::numbers::pi;
  const double u = static_cast<double>(xi) / n;
  const std::complex<double> num = std::polar(1.0, two_pi * u) - 1.0;
  std::complex<double> s{};
  for (std::int64_t k = -K; k <= K; ++k) {
    const double v = u - static_cast<double>(k);
    const std::complex<double> ck = v == 0.0 ? std::complex<double>(1.0) : num / std::complex<double>(0.0, two_pi * v);
    s += ck * digit_measure_hat(static_cast<double>(xi) - static_cast<double>(k) * n, base, digits, depth);
  }
  return s;
}

struct LinearHit {
  std::int64_t x_cell = 0;
  std::size_t node = 0;
};

// First (x, t) for {t, 2t} in (cell, node) order: enumerate pairs (c, c1) in E with
// c1 < c, find the nodes with ceil(t N) = c - c1 by bisection, test the third point.
inline std::optional<LinearHit> linear_progression(const DyadicSet& E, const std::vector<double>& nodes) {
  const auto N = static_cast<std::int64_t>(E.grid_size());
  auto cells_of = [N](double t, long double factor) {
    return static_cast<std::int64_t>(std::ceil(factor * static_cast<long double>(t) * N));
  };
  std::optional<LinearHit> best;
  for (std::uint32_t c : E.cells())
    for (std::uint32_t c1 : E.cells()) {
      if (c1 >= c) break;
      const std::int64_t d = static_cast<std::int64_t>(c) - c1;
      auto it = std::partition_point(nodes.begin(), nodes.end(), [&](double t) { return cells_of(t, 1) < d; });
      for (; it != nodes.end() && cells_of(*it, 1) == d; ++it) {
        const std::int64_t c2 = static_cast<std::int64_t>(c) - cells_of(*it, 2);
        if (c2 < 0 || !E.contains(c2)) continue;
        const auto q = static_cast<std::size_t>(it - nodes.begin());
        if (!best || c < best->x_cell || (c == best->x_cell && q < best->node)) best = LinearHit{c, q};
      }
    }
  return best;
}

}  // namespace oracle
