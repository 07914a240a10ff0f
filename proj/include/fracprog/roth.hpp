#pragma once

// Generalized three-term forms
//   Lambda(h, g, g') = int int h((th2 x - th1 t) / (th2 - th1)) g(x) g'(t) dx dt
// on the torus, evaluated physically (double Riemann sum) or on the Fourier
// side through an exact refined spectrum, with the level decomposition, the
// diagonal mass and a combined certificate.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fracprog/fourier.hpp"
#include "fracprog/grid.hpp"
#include "fracprog/measures.hpp"
#include "fracprog/numerics.hpp"
#include "fracprog/polynomial.hpp"

namespace fracprog {

// Two distinct nonzero rationals in Q_M = (union_{n <= M} Z/n) intersected with [-M, M].
struct ThetaPair {
  Rational theta1{1};
  Rational theta2{2};
  int M = 2;

  ThetaPair() = default;
  ThetaPair(Rational t1, Rational t2, int M);

  void validate() const;
  std::string to_string() const;
};

// "p1/q1,p2/q2". M defaults to the smallest admissible bound.
ThetaPair parse_theta_pair(std::string_view text, std::optional<int> M = std::nullopt);

// The form in lattice coordinates: the h-slot index for cells (j, k) is
// floor((a j + b k) / D) mod N, with D > 0 and gcd(a, b, D) = 1.
struct FormCoefficients {
  std::int64_t a = 0;
  std::int64_t b = 0;
  std::int64_t D = 1;
};
FormCoefficients form_coefficients(const ThetaPair& th);

// Largest refined spectrum length D * 2^J the Fourier side may allocate.
inline constexpr std::size_t kMaxRefinedLength = std::size_t{1} << 26;

double trilinear_physical(const GridFunction& h, const GridFunction& g2, const GridFunction& g3, const ThetaPair& th);
// Sum over zeta of H(zeta) S2(-a zeta) S3(-b zeta) with H the spectrum of h upsampled by D
// and S the length-D*N spectra of g2, g3. Equal to trilinear_physical up to rounding.
double trilinear_fourier(const GridFunction& h, const GridFunction& g2, const GridFunction& g3, const ThetaPair& th);

// Lambda(h, mu, mu); mu must be a probability density.
double lambda_physical(const GridFunction& h, const GridFunction& mu, const ThetaPair& th);

// Lambda(h_l, mu, mu) with h_l the level-l piece of mu (level 0 is mu_{<=0}), or mu itself.
double lambda_fourier(const GridFunction& mu, const ThetaPair& th, std::optional<int> level = std::nullopt);

// Littlewood-Paley level pieces: mu_{<=l} = lp_low(mu, l) and mu_l = mu_{<=l} - mu_{<=l-1}.
GridFunction level_low(const GridFunction& mu, int l);
GridFunction level_piece(const GridFunction& mu, int l);

// Lambda_l = L(mu_l, P_l, P_l) + L(P_{l-1}, mu_l, P_l) + L(P_{l-1}, P_{l-1}, mu_l), P_l = mu_{<=l};
// 1 <= l <= J-1. Summing l0+1..J-1 and adding L(P_l0, P_l0, P_l0) gives Lambda(mu) exactly.
double lambda_level(const GridFunction& mu, const ThetaPair& th, int l);

enum class ChiProfile {
  smooth,  // |inverse transform of phi_hat|^2, normalized to 1 at 0
  zero,
};

// chi^delta(z) = chi((z - 1) / delta) periodized, sampled at the left endpoints.
GridFunction diagonal_cutoff(int J, double delta, ChiProfile profile = ChiProfile::smooth);
// Fourier transform of the smooth profile, supported in [-4, 4].
double chi_hat(double eta);

// l0 with 2^-l0 = delta^((beta - kappa) / (1 - beta)), kappa = min(0.1, 2 beta - 1 - 0.01),
// clamped to [0, J-1]. Requires beta > 1/2.
int diagonal_split_level(double delta, double beta, int J);

struct DiagonalMass {
  double delta = 0.0;
  int l0 = 0;
  double total = 0.0;
  double low = 0.0;                           // Lambda(chi^delta mu_{<=l0}, mu, mu)
  std::vector<std::pair<int, double>> tail;   // (l, Lambda(chi^delta mu_l, mu, mu)), l > l0
};

// Lambda(chi^delta mu, mu, mu). Requires 0 < delta < 1/4 and beta > 1/2.
DiagonalMass diagonal_mass(const GridFunction& mu, const ThetaPair& th, double delta, double beta,
                           ChiProfile profile = ChiProfile::smooth);

// Slope of log2(mass) against log2(delta).
LinearFit diagonal_slope(const std::vector<DiagonalMass>& masses);

struct RothOptions {
  std::vector<double> deltas{0.125, 0.0625, 0.03125, 0.015625, 0.0078125, 0.00390625, 0.001953125};
  std::optional<int> lmax;  // decay profile range, default J-2
};

struct RothReport {
  std::string theta;
  int l0 = 0;
  double lambda_total = 0.0;
  double lambda_low = 0.0;
  double low_sup_norm = 0.0;  // ||mu_{<=l0}||_inf
  std::vector<std::pair<int, double>> tail;
  double tail_abs_sum = 0.0;
  std::vector<DiagonalMass> diagonal;
  double beta = 0.0;
  double c0_fit = 0.0;
  double decay_threshold = 0.0;  // (1 - beta) / 4
  std::optional<double> tail_slope;
  std::optional<double> diagonal_slope;
  bool decay_ok = false;     // (a) c0 > (1 - beta) / 4
  bool tail_ok = false;      // (b) sum |Lambda_l| < lambda_total / 2
  bool diagonal_ok = false;  // (c) diagonal mass at the smallest delta < lambda_total / 2
  bool pass = false;
  std::vector<std::string> failures;
};

RothReport roth_certificate(const GridFunction& mu, const FrostmanEstimate& frost, const ThetaPair& th, int l0,
                            const RothOptions& options = {});

}  // namespace fracprog
