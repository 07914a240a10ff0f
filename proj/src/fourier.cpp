#include "fracprog/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fracprog/errors.hpp"
#include "fracprog/numerics.hpp"

namespace fracprog {

Spectrum::Spectrum(int J, std::vector<std::complex<double>> coeffs) : J_(J), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != (std::size_t{1} << J)) throw RangeError("spectrum needs 2^J coefficients");
}

Spectrum transform(const GridFunction& f) { return {f.resolution(), forward_dft_real(f.values())}; }

GridFunction inverse(const Spectrum& s) {
  const auto c = inverse_dft(s.coeffs());
  std::vector<double> v(c.size());
  for (std::size_t j = 0; j < c.size(); ++j) v[j] = c[j].real();
  return {s.resolution(), std::move(v)};
}

double smooth_step(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / u);
  const double b = std::exp(-1.0 / (1.0 - u));
  return a / (a + b);
}

void apply_multiplier(Spectrum& s, const std::function<double(double)>& m) {
  for (std::size_t k = 0; k < s.size(); ++k) s.coeffs()[k] *= m(static_cast<double>(s.frequency(k)));
}

GridFunction apply_multiplier(const GridFunction& f, const std::function<double(double)>& m) {
  Spectrum s = transform(f);
  apply_multiplier(s, m);
  return inverse(s);
}

GridFunction lp_low(const GridFunction& f, int l) {
  const int J = f.resolution();
  if (l < 0 || l > J - 1) throw RangeError("lp_low level l=" + std::to_string(l) + " outside [0, J-1]");
  const double scale = std::ldexp(1.0, -l);
  return apply_multiplier(f, [scale](double xi) { return KernelPair::phi_hat(xi * scale); });
}

GridFunction lp_piece(const GridFunction& f, int l) {
  const int J = f.resolution();
  if (l < 0 || l > max_piece_level(J))
    throw RangeError("lp_piece level l=" + std::to_string(l) + " outside [0, J-2]");
  const double scale = std::ldexp(1.0, -l);
  return apply_multiplier(f, [scale](double xi) { return KernelPair::psi_hat(xi * scale); });
}

double annulus_norm(const Spectrum& s, int l, double p) {
  if (l < 1) throw RangeError("annulus_norm needs l >= 1");
  if (!(p == 2.0 || p == 4.0 || std::isinf(p))) throw RangeError("annulus_norm supports p in {2, 4, inf}");
  const std::int64_t lo = std::int64_t{1} << (l - 1);
  const std::int64_t hi = std::int64_t{1} << (l + 1);
  if (lo > s.nyquist())
    throw RangeError("annulus l=" + std::to_string(l) + " is empty at J=" + std::to_string(s.resolution()));
  double acc = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const std::int64_t a = std::abs(s.frequency(k));
    if (a < lo || a > hi) continue;
    const double v = std::abs(s.coeffs()[k]);
    if (std::isinf(p))
      acc = std::max(acc, v);
    else
      acc += std::pow(v, p);
  }
  return std::isinf(p) ? acc : std::pow(acc, 1.0 / p);
}

double annulus_norm(const GridFunction& f, int l, double p) { return annulus_norm(transform(f), l, p); }

GridFunction square_function(const GridFunction& f) {
  const Spectrum base = transform(f);
  GridFunction acc(f.resolution());
  for (int l = 0; l <= max_piece_level(f.resolution()); ++l) {
    Spectrum s = base;
    const double scale = std::ldexp(1.0, -l);
    apply_multiplier(s, [scale](double xi) { return KernelPair::psi_hat(xi * scale); });
    const GridFunction piece = inverse(s);
    for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += piece[j] * piece[j];
  }
  for (std::size_t j = 0; j < acc.size(); ++j) acc[j] = std::sqrt(acc[j]);
  return acc;
}

double fitted_decay(const std::vector<int>& levels, const std::vector<double>& norms) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (norms[i] < kNoDecayFloor) continue;
    xs.push_back(levels[i]);
    ys.push_back(std::log2(norms[i]));
  }
  if (xs.size() < 2) return std::numeric_limits<double>::infinity();
  return -fit_line(xs, ys).slope;
}

DecayProfile decay_profile(const GridFunction& mu, int lmax, std::optional<double> beta) {
  if (lmax < 3) throw RangeError("decay_profile needs at least 3 annuli (lmax >= 3)");
  if (lmax > mu.resolution() - 2) throw RangeError("decay_profile needs lmax <= J-2");
  const Spectrum s = transform(mu);
  DecayProfile out;
  std::vector<int> levels;
  std::vector<double> sup, l2, l4;
  for (int l = 1; l <= lmax; ++l) {
    DecayRow row{l, annulus_norm(s, l, std::numeric_limits<double>::infinity()), annulus_norm(s, l, 2.0),
                 annulus_norm(s, l, 4.0)};
    out.rows.push_back(row);
    levels.push_back(l);
    sup.push_back(row.sup);
    l2.push_back(row.l2);
    l4.push_back(row.l4);
  }
  out.c0_sup = fitted_decay(levels, sup);
  out.c0_l2 = fitted_decay(levels, l2);
  out.c0_l4 = fitted_decay(levels, l4);
  {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < levels.size(); ++i)
      if (l4[i] >= kNoDecayFloor) {
        xs.push_back(levels[i]);
        ys.push_back(std::log2(l4[i]));
      }
    out.r_squared_l4 = xs.size() >= 2 ? fit_line(xs, ys).r_squared : 1.0;
  }
  if (beta) {
    out.beta = beta;
    out.threshold = (1.0 - *beta) / 4.0;
    out.exceeds_threshold = out.c0_l4 > *out.threshold;
  }
  return out;
}

}  // namespace fracprog
