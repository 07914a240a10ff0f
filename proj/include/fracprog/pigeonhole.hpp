#pragma once

// Quantitative steps of the density-increment argument: a good scale for the
// pairing int f_0 B_k(f_1..f_m), energy extraction at a shifted annulus, and the
// low-frequency product lower bound.

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fracprog/grid.hpp"
#include "fracprog/polynomial.hpp"

namespace fracprog {

// Named constants standing in for the implicit ones.
struct PigeonholeConstants {
  double c_suite = 0.01;  // good-scale threshold c_suite eps^(m+1)
  double c_small = 0.001; // extraction gate c_small eps^(m+1)
  double c_e = 0.01;      // extraction threshold c_e eps^(1+2/m)
};

struct LowerBoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double c = 0.0;
  bool pass = false;
};

// lhs = int prod_i lp_low(f, scales[i]), rhs = (int f)^(m+1), pass iff lhs >= 2^-(m+1) rhs.
// Requires 0 <= f <= 1 and scales.size() == m + 1.
LowerBoundCheck lower_bound_check(const GridFunction& f, const std::vector<int>& scales, int m);

struct EnergyEvent {
  int k = 0;
  std::size_t i = 0;  // zero-based slot
  int shift = 0;
  int level = 0;      // annulus index k e_i + shift after clipping to [0, J-2]
  double norm = 0.0;  // ||lp_piece(f_i, level)||_m
};

struct ExtractionResult {
  double pairing = 0.0;
  bool gated = false;  // pairing too large: the hypothesis does not hold, nothing searched
  std::optional<EnergyEvent> event;
  std::vector<EnergyEvent> candidates;  // every (i, shift) evaluated, in search order
  double threshold = 0.0;
  std::vector<std::string> warnings;
};

inline int default_shift_range(double epsilon) {
  return static_cast<int>(std::ceil(3.0 * std::log2(1.0 / epsilon)));
}

// If int f_0 B_k(fs) < c_small eps^(m+1), maximize ||lp_piece(f_i, k e_i + s)||_m over
// slots i and |s| <= shift_range; ties go to the lexicographically first (i, |s|, sign).
ExtractionResult energy_extraction(const PolynomialFamily& fam, const std::vector<GridFunction>& fs,
                                   const GridFunction& f0, int k, double epsilon,
                                   std::optional<int> shift_range = std::nullopt, std::size_t Q = 0,
                                   const PigeonholeConstants& constants = {});

struct PigeonholeReport {
  double epsilon = 0.0;
  int m = 0;
  std::optional<int> k_found;
  double pairing_value = 0.0;  // at k_found, or the last scanned k
  int scan_limit = 0;
  std::vector<std::pair<int, double>> trace;  // (k, pairing) for every scanned k
  std::vector<EnergyEvent> energy_events;
  std::vector<std::string> warnings;
  PigeonholeConstants constants;
};

// Mollification scale meaning "no mollification" (lp_low at level >= J-1 is the identity).
inline constexpr int kNoMollification = 1 << 20;

// Scan k = 0..min(K_max, ceil(eps^(-10 m))) for int f_0 B_k(f_1..f_m) >= c_suite eps^(m+1),
// with f_i = lp_low(f, t_list[i]). Scales whose pairing falls under the extraction gate
// run energy_extraction and their events are recorded.
PigeonholeReport find_good_scale(const PolynomialFamily& fam, const GridFunction& f, const GridFunction& f0,
                                 const std::vector<int>& t_list, double epsilon, int K_max, std::size_t Q = 0,
                                 const PigeonholeConstants& constants = {});

// ceil(eps^(-10 m)) saturated at INT_MAX.
int scan_bound(double epsilon, int m);

}  // namespace fracprog
