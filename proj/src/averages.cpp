#include "fracprog/averages.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "fracprog/errors.hpp"
#include "fracprog/fourier.hpp"
#include "fracprog/numerics.hpp"
#include "fracprog/parallel.hpp"

namespace fracprog {

namespace {

void check_inputs(const PolynomialFamily& fam, const std::vector<GridFunction>& fs) {
  if (fs.size() != fam.size())
    throw PreconditionError("poly-averages", "arity mismatch: family has " + std::to_string(fam.size()) +
                                                 " polynomials but " + std::to_string(fs.size()) +
                                                 " functions were given");
  if (fs.empty()) throw PreconditionError("poly-averages", "at least one function is needed to fix the grid");
  for (const auto& f : fs)
    if (f.resolution() != fs.front().resolution())
      throw PreconditionError("poly-averages", "functions at different resolutions");
}

}  // namespace

GridFunction average_at_nodes(const PolynomialFamily& fam, const std::vector<GridFunction>& fs,
                              const std::vector<double>& nodes, Boundary boundary) {
  check_inputs(fam, fs);
  const int J = fs.front().resolution();
  const std::size_t n = fs.front().size();
  const std::size_t m = fam.size();
  if (nodes.empty()) throw RangeError("average needs at least one quadrature node");

  // Cell displacement tuple of every node, then merge duplicates.
  std::vector<std::int64_t> shifts(nodes.size() * m);
  for (std::size_t q = 0; q < nodes.size(); ++q)
    for (std::size_t i = 0; i < m; ++i) shifts[q * m + i] = displacement_cells(fam[i](nodes[q]), J);
  std::vector<std::size_t> order(nodes.size());
  std::iota(order.begin(), order.end(), 0);
  auto tuple_less = [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(shifts.begin() + a * m, shifts.begin() + (a + 1) * m, shifts.begin() + b * m,
                                        shifts.begin() + (b + 1) * m);
  };
  std::stable_sort(order.begin(), order.end(), tuple_less);
  std::vector<std::int64_t> uniq;
  std::vector<double> weight;
  for (std::size_t r = 0; r < order.size(); ++r) {
    const std::size_t q = order[r];
    if (r > 0 && !tuple_less(order[r - 1], q)) {
      weight.back() += 1.0;
      continue;
    }
    uniq.insert(uniq.end(), shifts.begin() + q * m, shifts.begin() + (q + 1) * m);
    weight.push_back(1.0);
  }
  const std::size_t tuples = weight.size();

  std::vector<double> out(n, 0.0);
  const auto ni = static_cast<std::int64_t>(n);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t u = 0; u < tuples; ++u) {
      const std::int64_t* s = uniq.data() + u * m;
      for (std::size_t x = begin; x < end; ++x) {
        double prod = weight[u];
        for (std::size_t i = 0; i < m && prod != 0.0; ++i) {
          const std::int64_t idx = static_cast<std::int64_t>(x) - s[i];
          if (boundary == Boundary::periodic) {
            prod *= fs[i][displaced_index(x, s[i], n)];
          } else {
            prod *= (idx >= 0 && idx < ni) ? fs[i][static_cast<std::size_t>(idx)] : 0.0;
          }
        }
        out[x] += prod;
      }
    }
  });
  const double inv = 1.0 / static_cast<double>(nodes.size());
  for (double& v : out) v *= inv;
  return {J, std::move(out)};
}

GridFunction average(const PolynomialFamily& fam, const std::vector<GridFunction>& fs, int k, std::size_t Q,
                     Boundary boundary) {
  check_inputs(fam, fs);
  if (k < 0) throw RangeError("average needs k >= 0");
  if (Q == 0) Q = default_nodes(fs.front().resolution());
  std::vector<double> nodes(Q);
  const double scale = std::ldexp(1.0, -k);
  for (std::size_t q = 0; q < Q; ++q) nodes[q] = scale * (static_cast<double>(q) + 0.5) / static_cast<double>(Q);
  return average_at_nodes(fam, fs, nodes, boundary);
}

GridFunction truncated_average(const PolynomialFamily& fam, const std::vector<GridFunction>& fs, double kappa,
                               std::size_t Q, Boundary boundary) {
  check_inputs(fam, fs);
  if (!(kappa > 0.0 && kappa < 1.0)) throw RangeError("truncation kappa must lie in (0, 1)");
  if (Q == 0) Q = default_nodes(fs.front().resolution());
  std::vector<double> nodes(Q);
  for (std::size_t q = 0; q < Q; ++q)
    nodes[q] = kappa + (1.0 - kappa) * (static_cast<double>(q) + 0.5) / static_cast<double>(Q);
  return average_at_nodes(fam, fs, nodes, boundary);
}

GridFunction maximal_average(const PolynomialFamily& fam, const std::vector<GridFunction>& fs, int K, std::size_t Q) {
  check_inputs(fam, fs);
  if (K < 1) throw RangeError("maximal_average needs K >= 1");
  GridFunction best(fs.front().resolution());
  for (int k = 1; k <= K; ++k) {
    const GridFunction b = average(fam, fs, k, Q);
    for (std::size_t x = 0; x < best.size(); ++x) best[x] = std::max(best[x], std::abs(b[x]));
  }
  return best;
}

std::int64_t spectral_radius(const GridFunction& f, double tol) {
  const Spectrum s = transform(f);
  double peak = 0.0;
  for (const auto& c : s.coeffs()) peak = std::max(peak, std::abs(c));
  if (peak == 0.0) return 0;
  std::int64_t radius = 0;
  for (std::size_t k = 0; k < s.size(); ++k)
    if (std::abs(s.coeffs()[k]) > tol * peak) radius = std::max(radius, std::abs(s.frequency(k)));
  return radius;
}

double lowfreq_factorization_error(const PolynomialFamily& fam, const std::vector<GridFunction>& fs, std::size_t i,
                                   int k, int l, std::size_t Q) {
  check_inputs(fam, fs);
  if (i >= fam.size()) throw RangeError("slot index out of range");
  if (k < 0 || l < 0) throw RangeError("lowfreq_factorization_error needs k, l >= 0");
  const double bound = std::ldexp(1.0, k * fam[i].lowest_order() - l);
  const std::int64_t radius = spectral_radius(fs[i]);
  if (static_cast<double>(radius) > bound)
    throw PreconditionError("poly-averages", "slot " + std::to_string(i) + " has spectrum at |xi| = " +
                                                 std::to_string(radius) + " beyond the allowed 2^(k e_i - l) = " +
                                                 std::to_string(bound));
  const GridFunction full = average(fam, fs, k, Q);
  GridFunction factored = fs[i];
  if (fam.size() > 1) {
    std::vector<GridFunction> rest;
    for (std::size_t j = 0; j < fs.size(); ++j)
      if (j != i) rest.push_back(fs[j]);
    factored *= average(fam.without(i), rest, k, Q);
  }
  return sup_norm(full - factored);
}

GridFunction high_pass(const GridFunction& f, std::int64_t radius) {
  const auto r = static_cast<double>(radius);
  return apply_multiplier(f, [r](double xi) { return std::abs(xi) <= r ? 0.0 : 1.0; });
}

GridFunction low_pass(const GridFunction& f, std::int64_t radius) {
  const auto r = static_cast<double>(radius);
  return apply_multiplier(f, [r](double xi) { return std::abs(xi) <= r ? 1.0 : 0.0; });
}

GridFunction random_bounded_function(int J, std::uint64_t seed, int level) {
  Rng rng(seed);
  std::vector<double> v(std::size_t{1} << J);
  for (double& x : v) x = (rng.next() >> 63) ? 1.0 : -1.0;
  GridFunction f = lp_low(GridFunction(J, std::move(v)), std::clamp(level, 0, J - 1));
  for (double& x : f.values()) x = std::clamp(x, -1.0, 1.0);
  return f;
}

namespace {

std::uint64_t probe_seed(std::uint64_t seed, int n, int trial, std::size_t slot, std::size_t hp) {
  std::uint64_t s = splitmix64(seed);
  s = splitmix64(s ^ static_cast<std::uint64_t>(n + 1000));
  s = splitmix64(s ^ static_cast<std::uint64_t>(trial) << 20);
  s = splitmix64(s ^ (static_cast<std::uint64_t>(slot) << 40) ^ (static_cast<std::uint64_t>(hp) << 48));
  return s;
}

double normalized_l1(const PolynomialFamily& fam, const std::vector<GridFunction>& fs, int scale, std::size_t Q) {
  const double p = static_cast<double>(fam.size());
  double denom = 1.0;
  for (const auto& f : fs) denom *= lp_norm(f, p);
  if (denom == 0.0) return 0.0;
  return lp_norm(average(fam, fs, scale, Q), 1.0) / denom;
}

// Smallest b > threshold for which a = -b c2 / c1 is an integer; returns {a, b}.
std::pair<std::int64_t, std::int64_t> modulation_pair(const PolynomialFamily& fam, std::int64_t threshold) {
  const int e = fam[1].lowest_order();
  const Rational ratio = fam[1].coeff(e) / fam[0].coeff(e);  // c2 / c1
  std::int64_t b = threshold + 1;
  while (b % ratio.den != 0) ++b;
  return {-b * ratio.num / ratio.den, b};
}

}  // namespace

SobolevProbeResult sobolev_probe(const PolynomialFamily& fam, const SobolevProbeOptions& opt) {
  if (opt.cutoffs.size() < 3) throw RangeError("sobolev_probe needs at least 3 cutoffs to fit");
  if (opt.trials < 1) throw RangeError("sobolev_probe needs trials >= 1");
  if (opt.J < kMinResolution || opt.J > kMaxResolution) throw RangeError("sobolev_probe resolution out of range");
  if (opt.scale < 0) throw RangeError("sobolev_probe needs scale >= 0");
  const int J = opt.J;
  const std::int64_t nyquist = std::int64_t{1} << (J - 1);
  const std::size_t m = fam.size();
  const auto orders = fam.lowest_orders();

  SobolevProbeResult res;
  res.family = fam.to_string();
  res.relatively_curved = fam.relatively_curved();
  res.cutoffs = opt.cutoffs;

  if (opt.inputs == ProbeInputs::modulated) {
    if (m < 2 || orders[0] != orders[1])
      throw PreconditionError("poly-averages",
                              "modulated inputs need two polynomials vanishing to the same order");
  }

  for (int n : opt.cutoffs) {
    double worst = 0.0;
    bool feasible = false;
    if (opt.inputs == ProbeInputs::modulated) {
      const std::int64_t radius = std::int64_t{1} << (n + opt.scale * orders[1]);
      const auto [a, b] = modulation_pair(fam, radius);
      if (std::max(std::abs(a), std::abs(b)) >= nyquist)
        throw RangeError("cutoff 2^" + std::to_string(n) + " leaves no room for the modulated pair at J=" +
                         std::to_string(J));
      feasible = true;
      std::vector<GridFunction> fs;
      for (std::size_t j = 0; j < m; ++j) {
        GridFunction f(J, 1.0);
        if (j < 2) {
          const double freq = static_cast<double>(j == 0 ? a : b);
          for (std::size_t x = 0; x < f.size(); ++x) f[x] = std::cos(2.0 * M_PI * freq * f.point(x));
        }
        fs.push_back(std::move(f));
      }
      worst = normalized_l1(fam, fs, opt.scale, opt.nodes);
    } else {
      for (std::size_t hp = 0; hp < m; ++hp) {
        const int cut_exp = n + opt.scale * orders[hp];
        if (cut_exp >= J - 1) {
          // The forbidden ball covers the whole spectrum: this slot cannot be high-passed.
          res.skipped.emplace_back(n, static_cast<int>(hp));
          continue;
        }
        feasible = true;
        const std::int64_t radius = std::int64_t{1} << cut_exp;
        for (int trial = 0; trial < opt.trials; ++trial) {
          std::vector<GridFunction> fs;
          for (std::size_t j = 0; j < m; ++j) {
            const std::uint64_t s = probe_seed(opt.seed, n, trial, j, hp);
            if (j == hp)
              fs.push_back(high_pass(random_bounded_function(J, s, cut_exp + 1), radius));
            else
              fs.push_back(random_bounded_function(J, s, J - 2));
          }
          worst = std::max(worst, normalized_l1(fam, fs, opt.scale, opt.nodes));
        }
      }
    }
    if (!feasible)
      throw RangeError("cutoff 2^" + std::to_string(n) + " exceeds the representable spectrum at J=" +
                       std::to_string(J));
    res.l1_norms.push_back(worst);
  }

  std::vector<double> xs, ys;
  for (std::size_t c = 0; c < res.cutoffs.size(); ++c) {
    if (res.l1_norms[c] < kNoDecayFloor) continue;
    xs.push_back(res.cutoffs[c]);
    ys.push_back(std::log2(res.l1_norms[c]));
  }
  if (xs.size() < 3) throw RangeError("sobolev_probe: fewer than 3 nonzero measurements to fit");
  const LinearFit fit = fit_line(xs, ys);
  res.sigma_fit = -fit.slope;
  res.c_fit = std::exp2(fit.intercept);
  res.r_squared = fit.r_squared;
  return res;
}

}  // namespace fracprog
