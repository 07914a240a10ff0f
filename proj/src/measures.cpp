#include "fracprog/measures.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <string>

#include "fracprog/errors.hpp"
#include "fracprog/numerics.hpp"

namespace fracprog {

void DigitConstruction::validate() const {
  if (base < 2) throw PreconditionError("fractal-measures", "base must be >= 2");
  if (digits.empty()) throw PreconditionError("fractal-measures", "empty digit set");
  if (depth < 1) throw PreconditionError("fractal-measures", "depth must be >= 1");
  std::set<int> seen;
  for (int d : digits) {
    if (d < 0 || d >= base)
      throw PreconditionError("fractal-measures", "digit " + std::to_string(d) + " outside [0, base)");
    if (!seen.insert(d).second) throw PreconditionError("fractal-measures", "repeated digit " + std::to_string(d));
  }
}

double DigitConstruction::similarity_dimension() const {
  return std::log(static_cast<double>(digits.size())) / std::log(static_cast<double>(base));
}

namespace {

// Children kept below a node, given the node's derived seed.
using ChildRule = std::function<std::vector<int>(std::uint64_t node_seed)>;

struct Rasterizer {
  int base;
  int depth;
  ChildRule children;
  std::vector<double> cell_mass;  // mass per cell, before division by cell width
  long double n_cells;

  // Node covers [lo, lo + len) in cell units and carries `mass`.
  void visit(long double lo, long double len, double mass, int level, std::uint64_t seed) {
    const long double hi = lo + len;
    const auto first = static_cast<std::int64_t>(std::floor(lo));
    if (hi <= static_cast<long double>(first + 1)) {
      cell_mass[static_cast<std::size_t>(first)] += mass;
      return;
    }
    if (level == depth) {
      const auto last = static_cast<std::int64_t>(std::ceil(hi)) - 1;
      for (std::int64_t c = first; c <= last; ++c) {
        const long double a = std::max<long double>(lo, static_cast<long double>(c));
        const long double b = std::min<long double>(hi, static_cast<long double>(c + 1));
        if (b > a) cell_mass[static_cast<std::size_t>(c)] += static_cast<double>(mass * ((b - a) / len));
      }
      return;
    }
    const std::vector<int> kept = children(seed);
    const long double child_len = len / static_cast<long double>(base);
    const double child_mass = mass / static_cast<double>(kept.size());
    for (int d : kept) {
      const std::uint64_t child_seed = splitmix64(seed ^ (0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(d + 1)));
      visit(lo + child_len * static_cast<long double>(d), child_len, child_mass, level + 1, child_seed);
    }
  }
};

GridFunction rasterize(int J, int base, int depth, double total, std::uint64_t root_seed, ChildRule rule) {
  const std::size_t n = std::size_t{1} << J;
  Rasterizer r{base, depth, std::move(rule), std::vector<double>(n, 0.0), static_cast<long double>(n)};
  r.visit(0.0L, r.n_cells, total, 0, splitmix64(root_seed));
  for (double& m : r.cell_mass) m *= static_cast<double>(n);
  return {J, std::move(r.cell_mass)};
}

void check_grid_resolution(int J) {
  if (J < 1 || J > kMaxResolution) throw RangeError("resolution J=" + std::to_string(J) + " out of range");
}

}  // namespace

GridFunction cantor_measure(const DigitConstruction& c, int J) {
  c.validate();
  check_grid_resolution(J);
  std::vector<int> digits = c.digits;
  std::sort(digits.begin(), digits.end());
  return rasterize(J, c.base, c.depth, 1.0, 0, [digits](std::uint64_t) { return digits; });
}

GridFunction cylinder_coverage(const DigitConstruction& c, int J) {
  c.validate();
  check_grid_resolution(J);
  std::vector<int> digits = c.digits;
  std::sort(digits.begin(), digits.end());
  // Lebesgue measure of the cylinder set; mass follows length.
  const double total = std::pow(static_cast<double>(digits.size()) / c.base, c.depth);
  return rasterize(J, c.base, c.depth, total, 0, [digits](std::uint64_t) { return digits; });
}

GridFunction random_digit_measure(int base, int keep, int depth, std::uint64_t seed, int J) {
  if (base < 2) throw PreconditionError("fractal-measures", "base must be >= 2");
  if (keep < 1 || keep > base) throw PreconditionError("fractal-measures", "keep must lie in [1, base]");
  if (depth < 1) throw PreconditionError("fractal-measures", "depth must be >= 1");
  check_grid_resolution(J);
  return rasterize(J, base, depth, 1.0, seed, [base, keep](std::uint64_t node_seed) {
    std::vector<int> pool(static_cast<std::size_t>(base));
    for (int d = 0; d < base; ++d) pool[d] = d;
    Rng rng(node_seed);
    for (int i = 0; i < keep; ++i) {
      const auto j = static_cast<std::size_t>(i) + rng.below(static_cast<std::uint64_t>(base - i));
      std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
    }
    pool.resize(static_cast<std::size_t>(keep));
    std::sort(pool.begin(), pool.end());
    return pool;
  });
}

GridFunction lebesgue_density(int J) { return {J, 1.0}; }

std::vector<double> dyadic_max_masses(const GridFunction& mu) {
  const int J = mu.resolution();
  std::vector<double> level(mu.values().begin(), mu.values().end());
  for (double& m : level) m *= mu.cell_width();
  std::vector<double> out(static_cast<std::size_t>(J) + 1);
  for (int k = J; k >= 0; --k) {
    out[static_cast<std::size_t>(k)] = *std::max_element(level.begin(), level.end());
    if (k == 0) break;
    std::vector<double> up(level.size() / 2);
    for (std::size_t i = 0; i < up.size(); ++i) up[i] = level[2 * i] + level[2 * i + 1];
    level.swap(up);
  }
  return out;
}

namespace {

void require_probability(const GridFunction& mu) {
  if (!mu.is_nonnegative()) throw PreconditionError("fractal-measures", "measure density has negative values");
  const double mass = integrate(mu);
  if (std::abs(mass - 1.0) > 1e-9)
    throw PreconditionError("fractal-measures", "measure is not normalized (total mass " + std::to_string(mass) + ")");
}

}  // namespace

FrostmanEstimate frostman_constant(const GridFunction& mu, double beta) {
  if (!(beta > 0.0 && beta <= 1.0)) throw RangeError("Frostman exponent must lie in (0, 1]");
  require_probability(mu);
  const auto masses = dyadic_max_masses(mu);
  double lambda = 0.0;
  for (int k = 1; k <= mu.resolution(); ++k)
    lambda = std::max(lambda, masses[static_cast<std::size_t>(k)] * std::exp2(beta * k));
  return {beta, lambda, 2.0 * lambda, mu.resolution()};
}

double estimate_frostman_exponent(const GridFunction& mu) {
  require_probability(mu);
  const auto masses = dyadic_max_masses(mu);
  std::vector<double> ks, ys;
  for (int k = 1; k <= mu.resolution(); ++k) {
    ks.push_back(k);
    ys.push_back(-std::log2(masses[static_cast<std::size_t>(k)]));
  }
  const double slope = fit_line(ks, ys).slope;
  return std::clamp(slope, 1e-6, 1.0);
}

FrostmanEstimate certify_frostman(const GridFunction& mu) { return frostman_constant(mu, estimate_frostman_exponent(mu)); }

double hausdorff_content(const DyadicSet& E, double s) {
  if (!(s > 0.0 && s <= 1.0)) throw RangeError("content exponent must lie in (0, 1]");
  if (E.empty()) return 0.0;
  const int J = E.resolution();
  std::vector<double> cost(E.grid_size(), 0.0);
  const double leaf = std::exp2(-s * J);
  for (auto c : E.cells()) cost[c] = leaf;
  for (int k = J - 1; k >= 0; --k) {
    const double whole = std::exp2(-s * k);
    std::vector<double> up(cost.size() / 2);
    for (std::size_t i = 0; i < up.size(); ++i) {
      const double split = cost[2 * i] + cost[2 * i + 1];
      up[i] = split > 0.0 ? std::min(split, whole) : 0.0;
    }
    cost.swap(up);
  }
  return cost[0];
}

}  // namespace fracprog
