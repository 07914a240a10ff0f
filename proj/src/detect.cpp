#include "fracprog/detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fracprog/averages.hpp"
#include "fracprog/errors.hpp"
#include "fracprog/parallel.hpp"

namespace fracprog {

namespace {

void check_kappa(double kappa) {
  if (!(kappa > 0.0 && kappa < 1.0)) throw RangeError("kappa must lie in (0, 1)");
}

// Cells between c and the nearest non-member (or the ends of [0, 1)), minus one.
std::int64_t cell_margin(const std::vector<std::uint8_t>& mask, std::int64_t c) {
  const auto n = static_cast<std::int64_t>(mask.size());
  std::int64_t d = 0;
  while (d < n) {
    const std::int64_t lo = c - d - 1;
    const std::int64_t hi = c + d + 1;
    if (lo < 0 || hi >= n || !mask[static_cast<std::size_t>(lo)] || !mask[static_cast<std::size_t>(hi)]) break;
    ++d;
  }
  return d;
}

}  // namespace

std::vector<double> t_grid_nodes(double kappa, std::size_t t_grid) {
  check_kappa(kappa);
  if (t_grid == 0) throw RangeError("t grid needs at least one node");
  std::vector<double> ts(t_grid);
  if (t_grid == 1) {
    ts[0] = kappa;
    return ts;
  }
  for (std::size_t q = 0; q < t_grid; ++q)
    ts[q] = kappa + (1.0 - kappa) * static_cast<double>(q) / static_cast<double>(t_grid - 1);
  return ts;
}

std::optional<Witness> detect(const DyadicSet& E, const PolynomialFamily& fam, double kappa, std::size_t t_grid) {
  const auto ts = t_grid_nodes(kappa, t_grid);
  const int J = E.resolution();
  const auto n = static_cast<std::int64_t>(E.grid_size());
  const std::size_t m = fam.size();
  const auto mask = E.mask();

  std::vector<std::int64_t> shifts(ts.size() * m);
  for (std::size_t q = 0; q < ts.size(); ++q)
    for (std::size_t i = 0; i < m; ++i) shifts[q * m + i] = displacement_cells(fam[i](ts[q]), J);

  auto first_t = [&](std::int64_t c) -> std::int64_t {
    for (std::size_t q = 0; q < ts.size(); ++q) {
      bool ok = true;
      for (std::size_t i = 0; i < m && ok; ++i) {
        const std::int64_t y = c - shifts[q * m + i];
        ok = y >= 0 && y < n && mask[static_cast<std::size_t>(y)];
      }
      if (ok) return static_cast<std::int64_t>(q);
    }
    return -1;
  };

  const auto& cells = E.cells();
  constexpr std::size_t kBlock = 1024;
  for (std::size_t start = 0; start < cells.size(); start += kBlock) {
    const std::size_t len = std::min(kBlock, cells.size() - start);
    std::vector<std::int64_t> hit(len, -1);
    parallel_for(len, [&](std::size_t b, std::size_t e) {
      for (std::size_t r = b; r < e; ++r) hit[r] = first_t(cells[start + r]);
    });
    for (std::size_t r = 0; r < len; ++r) {
      if (hit[r] < 0) continue;
      const std::int64_t c = cells[start + r];
      const auto q = static_cast<std::size_t>(hit[r]);
      Witness w;
      w.resolution = J;
      w.x = static_cast<double>(c) / static_cast<double>(n);
      w.t = ts[q];
      w.points.push_back(w.x);
      w.cells.push_back(c);
      for (std::size_t i = 0; i < m; ++i) {
        w.points.push_back(w.x - fam[i](w.t));
        w.cells.push_back(c - shifts[q * m + i]);
      }
      w.margin_cells = n;
      for (auto cell : w.cells) w.margin_cells = std::min(w.margin_cells, cell_margin(mask, cell));
      w.margin = static_cast<double>(w.margin_cells) / static_cast<double>(n);
      w.nontrivial = w.t >= kappa;
      return w;
    }
  }
  return std::nullopt;
}

bool verify_witness(const DyadicSet& E, const PolynomialFamily& fam, const Witness& w, double kappa) {
  if (w.resolution != E.resolution() || w.points.size() != fam.size() + 1) return false;
  if (!(w.t >= kappa && w.t <= 1.0)) return false;
  const long double n = static_cast<long double>(E.grid_size());
  const long double x = static_cast<long double>(w.x);
  if (std::floor(x * n) != x * n) return false;  // x must be a left endpoint
  for (std::size_t i = 0; i <= fam.size(); ++i) {
    long double p = x;
    if (i > 0) {
      // Horner in long double, independent of Polynomial::operator().
      const auto& cs = fam[i - 1].coeffs();
      long double v = 0.0L;
      for (std::size_t d = cs.size(); d-- > 0;)
        v = v * static_cast<long double>(w.t) + static_cast<long double>(cs[d].num) / static_cast<long double>(cs[d].den);
      p = x - v;
    }
    if (p < 0.0L || p >= 1.0L) return false;
    const auto cell = static_cast<std::int64_t>(std::floor(p * n));
    if (!E.contains(cell)) return false;
    if (i < w.cells.size() && w.cells[i] != cell) return false;
  }
  return true;
}

double average_certificate(const DyadicSet& E, const PolynomialFamily& fam, double kappa, std::size_t Q) {
  check_kappa(kappa);
  if (E.empty()) throw PreconditionError("progression-detect", "certificate needs a nonempty set");
  const GridFunction f = E.indicator() * (1.0 / E.measure());
  const std::vector<GridFunction> fs(fam.size(), f);
  return integrate(f * truncated_average(fam, fs, kappa, Q, Boundary::zero_extended));
}

}  // namespace fracprog
