#include "fracprog/pigeonhole.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <string>

#include "fracprog/averages.hpp"
#include "fracprog/errors.hpp"
#include "fracprog/fourier.hpp"

namespace fracprog {

namespace {

void require_unit_range(const GridFunction& f, const char* name) {
  for (double v : f.values())
    if (v < 0.0 || v > 1.0) throw RangeError(std::string(name) + " must take values in [0, 1]");
}

double pairing(const PolynomialFamily& fam, const std::vector<GridFunction>& fs, const GridFunction& f0, int k,
               std::size_t Q) {
  return integrate(f0 * average(fam, fs, k, Q));
}

}  // namespace

int scan_bound(double epsilon, int m) {
  const double e = -10.0 * m * std::log2(epsilon);
  if (e >= 31.0) return INT_MAX;
  return static_cast<int>(std::ceil(std::exp2(e) - 1e-9));
}

LowerBoundCheck lower_bound_check(const GridFunction& f, const std::vector<int>& scales, int m) {
  if (m < 1) throw RangeError("lower_bound_check: m must be >= 1");
  if (scales.size() != static_cast<std::size_t>(m) + 1)
    throw RangeError("lower_bound_check: expected " + std::to_string(m + 1) + " scales");
  require_unit_range(f, "f");
  GridFunction prod(f.resolution(), 1.0);
  for (int k : scales) {
    if (k < 0) throw RangeError("lower_bound_check: negative scale");
    prod = prod * lp_low(f, std::min(k, f.resolution() - 1));
  }
  LowerBoundCheck r;
  r.lhs = integrate(prod);
  r.rhs = std::pow(integrate(f), m + 1);
  r.c = std::exp2(-(m + 1));
  r.pass = r.lhs >= r.c * r.rhs;
  return r;
}

ExtractionResult energy_extraction(const PolynomialFamily& fam, const std::vector<GridFunction>& fs,
                                   const GridFunction& f0, int k, double epsilon, std::optional<int> shift_range,
                                   std::size_t Q, const PigeonholeConstants& constants) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw RangeError("epsilon must lie in (0, 1]");
  if (k < 0) throw RangeError("scale k must be >= 0");
  require_unit_range(f0, "f_0");
  for (const auto& f : fs) require_unit_range(f, "f_i");
  const int m = static_cast<int>(fam.size());
  const int R = shift_range.value_or(default_shift_range(epsilon));
  if (R < 0) throw RangeError("shift range must be >= 0");

  ExtractionResult res;
  res.pairing = pairing(fam, fs, f0, k, Q);
  res.threshold = constants.c_e * std::pow(epsilon, 1.0 + 2.0 / m);
  if (res.pairing >= constants.c_small * std::pow(epsilon, m + 1)) {
    res.gated = true;
    return res;
  }
  const int J = f0.resolution();
  const int top = max_piece_level(J);
  const auto orders = fam.lowest_orders();
  for (std::size_t i = 0; i < fs.size(); ++i) {
    for (int a = 0; a <= R; ++a) {
      for (int sign : {-1, 1}) {
        if (a == 0 && sign > 0) continue;
        const int shift = sign * a;
        const long long raw = static_cast<long long>(k) * orders[i] + shift;
        int level = static_cast<int>(std::clamp<long long>(raw, 0, top));
        if (level != raw)
          res.warnings.push_back("slot " + std::to_string(i) + " shift " + std::to_string(shift) + ": level " +
                                 std::to_string(raw) + " clipped to " + std::to_string(level));
        const double norm = lp_norm(lp_piece(fs[i], level), m);
        res.candidates.push_back({k, i, shift, level, norm});
        if (norm > res.threshold && (!res.event || norm > res.event->norm)) res.event = res.candidates.back();
      }
    }
  }
  return res;
}

PigeonholeReport find_good_scale(const PolynomialFamily& fam, const GridFunction& f, const GridFunction& f0,
                                 const std::vector<int>& t_list, double epsilon, int K_max, std::size_t Q,
                                 const PigeonholeConstants& constants) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw RangeError("epsilon must lie in (0, 1]");
  if (K_max < 0) throw RangeError("K_max must be >= 0");
  if (t_list.size() != fam.size())
    throw PreconditionError("pigeonhole-engine", "need one mollification scale per polynomial");
  if (f.resolution() != f0.resolution()) throw PreconditionError("pigeonhole-engine", "f and f_0 resolutions differ");
  require_unit_range(f, "f");
  require_unit_range(f0, "f_0");
  const double tol = 1e-12;
  if (integrate(f) < epsilon - tol)
    throw PreconditionError("pigeonhole-engine", "density of f is " + std::to_string(integrate(f)) + " < epsilon");
  if (integrate(f0) < epsilon - tol)
    throw PreconditionError("pigeonhole-engine", "density of f_0 is " + std::to_string(integrate(f0)) + " < epsilon");

  const int J = f.resolution();
  PigeonholeReport rep;
  rep.epsilon = epsilon;
  rep.m = static_cast<int>(fam.size());
  rep.constants = constants;
  rep.scan_limit = std::min(K_max, scan_bound(epsilon, rep.m));

  std::vector<GridFunction> fs;
  for (int t : t_list) {
    if (t < 0) throw RangeError("mollification scale must be >= 0");
    fs.push_back(t >= J - 1 ? f : lp_low(f, t));
  }
  // Mollified copies can overshoot [0, 1] slightly; extraction works on clamped copies.
  std::vector<GridFunction> clamped;
  for (const auto& g : fs) {
    std::vector<double> v(g.values().begin(), g.values().end());
    for (double& x : v) x = std::clamp(x, 0.0, 1.0);
    clamped.emplace_back(J, std::move(v));
  }

  const double good = constants.c_suite * std::pow(epsilon, rep.m + 1);
  const double gate = constants.c_small * std::pow(epsilon, rep.m + 1);
  for (int k = 0; k <= rep.scan_limit; ++k) {
    const double p = pairing(fam, fs, f0, k, Q);
    rep.trace.emplace_back(k, p);
    rep.pairing_value = p;
    if (p >= good) {
      rep.k_found = k;
      break;
    }
    if (p < gate) {
      auto ex = energy_extraction(fam, clamped, f0, k, epsilon, std::nullopt, Q, constants);
      if (ex.event) rep.energy_events.push_back(*ex.event);
      for (auto& w : ex.warnings) rep.warnings.push_back("k=" + std::to_string(k) + ": " + w);
    }
  }
  return rep;
}

}  // namespace fracprog
