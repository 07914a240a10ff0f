#pragma once

// Cantor-type and randomized fractal measures on the grid, with Frostman
// certificates and dyadic Hausdorff content.

#include <cstdint>
#include <optional>
#include <vector>

#include "fracprog/grid.hpp"

namespace fracprog {

// Base-b digit construction: keep the intervals whose first `depth` base-b
// digits all lie in `digits`. With a seed, random_digit_measure is used instead.
struct DigitConstruction {
  int base = 3;
  std::vector<int> digits{0, 2};
  int depth = 8;
  std::optional<std::uint64_t> seed;

  void validate() const;
  // log|digits| / log b.
  double similarity_dimension() const;
};

// Uniform self-similar measure on the depth-n cylinder set; a cell receives
// mass proportional to |cell ∩ cylinders|. Density integrates to 1.
GridFunction cantor_measure(const DigitConstruction& c, int J);

// Fraction of each cell covered by the depth-n cylinder set, in [0, 1].
GridFunction cylinder_coverage(const DigitConstruction& c, int J);

// At each level every surviving interval keeps a uniformly random `keep`-subset
// of its b children; mass is split evenly. Reproducible from seed and
// independent of J (each node draws from its own derived stream).
GridFunction random_digit_measure(int base, int keep, int depth, std::uint64_t seed, int J);

GridFunction lebesgue_density(int J);

struct FrostmanEstimate {
  double beta = 1.0;
  // max over dyadic I (scales 2^-1..2^-J) of mu(I) / |I|^beta.
  double lambda = 1.0;
  // 2 * lambda: valid for arbitrary intervals, each of which is covered by
  // two dyadic intervals of comparable length.
  double lambda_padded = 2.0;
  int resolution = 0;
};

// Requires a probability density (nonnegative, integral 1 +- 1e-9) and 0 < beta <= 1.
FrostmanEstimate frostman_constant(const GridFunction& mu, double beta);

// Largest dyadic interval mass at each scale 2^-k, k = 0..J.
std::vector<double> dyadic_max_masses(const GridFunction& mu);

// Slope of -log2 max_{|I| = 2^-k} mu(I) against k over k = 1..J, clipped to (0, 1].
double estimate_frostman_exponent(const GridFunction& mu);

// frostman_constant at the estimated exponent.
FrostmanEstimate certify_frostman(const GridFunction& mu);

// min sum |I_j|^s over covers of E by dyadic intervals of length >= 2^-J,
// by bottom-up dynamic programming on the dyadic tree.
double hausdorff_content(const DyadicSet& E, double s);

}  // namespace fracprog
