#pragma once

// Multilinear polynomial averages
//   B_k(f_1..f_m)(x) = int_0^1 prod_i f_i(x - P_i(2^-k t)) dt
// discretized by the midpoint rule in t and left-endpoint lookup in x.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fracprog/grid.hpp"
#include "fracprog/polynomial.hpp"

namespace fracprog {

enum class Boundary {
  periodic,       // x - P(t) taken mod 1
  zero_extended,  // functions vanish outside [0, 1)
};

// Default quadrature: 4 * 2^J midpoint nodes.
inline std::size_t default_nodes(int J) { return std::size_t{4} << J; }

// (1/|nodes|) sum_q prod_i f_i(x - P_i(nodes[q])). Nodes sharing the same cell
// displacements are merged, so the cost is (#distinct displacement tuples) * 2^J * m.
GridFunction average_at_nodes(const PolynomialFamily& fam, const std::vector<GridFunction>& fs,
                              const std::vector<double>& nodes, Boundary boundary = Boundary::periodic);

// B_k with Q midpoint nodes t_q = 2^-k (q + 1/2) / Q. Q = 0 selects default_nodes(J).
GridFunction average(const PolynomialFamily& fam, const std::vector<GridFunction>& fs, int k, std::size_t Q = 0,
                     Boundary boundary = Boundary::periodic);

// B_{0;kappa}: t restricted to [kappa, 1], normalized by 1 - kappa.
GridFunction truncated_average(const PolynomialFamily& fam, const std::vector<GridFunction>& fs, double kappa,
                               std::size_t Q = 0, Boundary boundary = Boundary::periodic);

// max_{1 <= k <= K} |B_k|.
GridFunction maximal_average(const PolynomialFamily& fam, const std::vector<GridFunction>& fs, int K,
                             std::size_t Q = 0);

// sup_x |B_k(fs) - fs_i B_k^{P without P_i}(fs without f_i)|. Requires the spectrum
// of fs_i inside |xi| <= 2^(k e_i - l); i is zero-based.
double lowfreq_factorization_error(const PolynomialFamily& fam, const std::vector<GridFunction>& fs, std::size_t i,
                                   int k, int l, std::size_t Q = 0);

// Largest |xi| with a coefficient above `tol` relative to the largest coefficient.
std::int64_t spectral_radius(const GridFunction& f, double tol = 1e-10);

enum class ProbeInputs {
  random,     // seeded random functions, one slot high-passed
  modulated,  // plane-wave pair tuned to the first two polynomials' leading coefficients
};

struct SobolevProbeOptions {
  int J = 12;
  std::vector<int> cutoffs;  // n values; the forbidden ball is |xi| <= 2^n 2^(scale e_i)
  int trials = 8;
  std::uint64_t seed = 7;
  int scale = 1;  // the dilation 2^-scale applied to t
  ProbeInputs inputs = ProbeInputs::random;
  std::size_t nodes = 0;
};

struct SobolevProbeResult {
  std::string family;
  bool relatively_curved = true;
  std::vector<int> cutoffs;
  // max over trials and high-passed slots of ||B||_1 / prod_j ||f_j||_m.
  std::vector<double> l1_norms;
  double sigma_fit = 0.0;
  double c_fit = 0.0;
  double r_squared = 0.0;
  // (cutoff, slot) pairs where the forbidden ball swallowed the whole spectrum.
  std::vector<std::pair<int, int>> skipped;
};

SobolevProbeResult sobolev_probe(const PolynomialFamily& fam, const SobolevProbeOptions& opt);

// Random test function: seeded +-1 cell signs, mollified by lp_low(., level), clamped to [-1, 1].
GridFunction random_bounded_function(int J, std::uint64_t seed, int level);

// Zero every coefficient with |xi| <= radius.
GridFunction high_pass(const GridFunction& f, std::int64_t radius);
// Zero every coefficient with |xi| > radius.
GridFunction low_pass(const GridFunction& f, std::int64_t radius);

}  // namespace fracprog
