#pragma once

// Direct search for polynomial progressions {x, x - P_1(t), ..., x - P_m(t)}
// inside a discretized set, and the averaged pairing that certifies them.
// Points must lie in [0, 1) itself (no wrap-around): on the torus every x
// would pair with t near 1, where each P_i(1) is an integer.

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "fracprog/grid.hpp"
#include "fracprog/polynomial.hpp"

namespace fracprog {

struct Witness {
  double x = 0.0;
  double t = 0.0;
  std::vector<double> points;           // x, x - P_1(t), ..., x - P_m(t)
  std::vector<std::int64_t> cells;      // cell index of each point
  int resolution = 0;
  std::int64_t margin_cells = 0;        // min over points of (cells to the complement of E) - 1
  double margin = 0.0;                  // margin_cells * 2^-J
  bool nontrivial = false;              // t >= kappa > 0
};

// kappa + (1 - kappa) q / (T - 1), q = 0..T-1 (just kappa when T = 1).
std::vector<double> t_grid_nodes(double kappa, std::size_t t_grid);

// First (x, t) in lexicographic order with every point in E. Requires 0 < kappa < 1, t_grid >= 1.
std::optional<Witness> detect(const DyadicSet& E, const PolynomialFamily& fam, double kappa, std::size_t t_grid);

// Recomputes every point from (x, t) and checks membership cell by cell.
bool verify_witness(const DyadicSet& E, const PolynomialFamily& fam, const Witness& w, double kappa = 0.0);

// int f B_{0;kappa}(f, ..., f) with f = 1_E / |E| (zero outside [0, 1)). Q = 0 selects default_nodes(J).
double average_certificate(const DyadicSet& E, const PolynomialFamily& fam, double kappa, std::size_t Q = 0);

// 2^(-J/2).
inline double default_kappa(int J) { return std::exp2(-0.5 * J); }

}  // namespace fracprog
