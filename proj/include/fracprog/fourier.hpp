#pragma once

// Discrete Fourier analysis on the 2^J-point torus and the Littlewood-Paley
// machinery built on a compactly supported smooth bump.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "fracprog/grid.hpp"

namespace fracprog {

// Coefficients coeffs(xi) = 2^-J sum_j f(x_j) e^{-2 pi i xi x_j}, stored in FFT
// order; at() accepts any integer frequency (taken mod 2^J).
class Spectrum {
 public:
  Spectrum(int J, std::vector<std::complex<double>> coeffs);

  int resolution() const { return J_; }
  std::size_t size() const { return coeffs_.size(); }
  // Largest |xi| representable: 2^(J-1).
  std::int64_t nyquist() const { return static_cast<std::int64_t>(coeffs_.size() / 2); }

  std::complex<double> at(std::int64_t xi) const { return coeffs_[slot(xi)]; }
  std::complex<double>& at(std::int64_t xi) { return coeffs_[slot(xi)]; }
  // Signed frequency of storage slot k, in [-2^(J-1), 2^(J-1)).
  std::int64_t frequency(std::size_t k) const {
    const auto n = static_cast<std::int64_t>(coeffs_.size());
    const auto s = static_cast<std::int64_t>(k);
    return s < n / 2 ? s : s - n;
  }
  const std::vector<std::complex<double>>& coeffs() const { return coeffs_; }
  std::vector<std::complex<double>>& coeffs() { return coeffs_; }

 private:
  std::size_t slot(std::int64_t xi) const {
    const auto n = static_cast<std::int64_t>(coeffs_.size());
    std::int64_t k = xi % n;
    if (k < 0) k += n;
    return static_cast<std::size_t>(k);
  }
  int J_;
  std::vector<std::complex<double>> coeffs_;
};

Spectrum transform(const GridFunction& f);
GridFunction inverse(const Spectrum& s);

// Smooth step h(u) = q(u) / (q(u) + q(1-u)), q(u) = exp(-1/u) for u > 0.
double smooth_step(double u);

// phi_hat(xi) = h(2 - |xi|): 1 on |xi| <= 1, 0 on |xi| >= 2.
// psi_hat(xi) = phi_hat(xi/2) - phi_hat(xi), supported in 1 < |xi| < 4.
struct KernelPair {
  static double phi_hat(double xi) { return smooth_step(2.0 - std::abs(xi)); }
  static double psi_hat(double xi) { return phi_hat(xi / 2.0) - phi_hat(xi); }
};

// Multiply the spectrum by m(xi) and invert.
GridFunction apply_multiplier(const GridFunction& f, const std::function<double(double)>& m);
void apply_multiplier(Spectrum& s, const std::function<double(double)>& m);

// phi_l * f: multiplier phi_hat(xi / 2^l), 0 <= l <= J-1 (l = J-1 is the identity).
GridFunction lp_low(const GridFunction& f, int l);
// psi_l * f: multiplier psi_hat(xi / 2^l), frequencies in (2^l, 2^(l+2)), 0 <= l <= J-2.
GridFunction lp_piece(const GridFunction& f, int l);

// Highest Littlewood-Paley piece index representable at resolution J.
inline int max_piece_level(int J) { return J - 2; }

// Closed dyadic annulus 2^(l-1) <= |xi| <= 2^(l+1); p in {2, 4, inf}.
double annulus_norm(const Spectrum& s, int l, double p);
double annulus_norm(const GridFunction& f, int l, double p);

// Sf = (sum_{l=0}^{J-2} |psi_l * f|^2)^(1/2).
GridFunction square_function(const GridFunction& f);

struct DecayRow {
  int l = 0;
  double sup = 0.0;
  double l2 = 0.0;
  double l4 = 0.0;
};

inline constexpr double kNoDecayFloor = 1e-13;

struct DecayProfile {
  std::vector<DecayRow> rows;
  // Fitted decay exponents c0 = -slope of log2(norm) against l, per column.
  // +infinity when every annulus norm is below kNoDecayFloor (flat measure).
  double c0_sup = 0.0;
  double c0_l2 = 0.0;
  double c0_l4 = 0.0;
  double r_squared_l4 = 1.0;
  std::optional<double> beta;
  // (1 - beta) / 4 when beta is supplied.
  std::optional<double> threshold;
  std::optional<bool> exceeds_threshold;
};

// Annuli l = 1..lmax with lmax <= J-2 and lmax >= 3.
DecayProfile decay_profile(const GridFunction& mu, int lmax, std::optional<double> beta = std::nullopt);

// Fitted exponent for one column; +inf when fewer than two norms survive the floor.
double fitted_decay(const std::vector<int>& levels, const std::vector<double>& norms);

}  // namespace fracprog
