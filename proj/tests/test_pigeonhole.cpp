#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fracprog/averages.hpp"
#include "fracprog/errors.hpp"
#include "fracprog/fourier.hpp"
#include "fracprog/numerics.hpp"
#include "fracprog/pigeonhole.hpp"
#include "oracles.hpp"

using namespace fracprog;

namespace {

// Two disjoint bump trains at frequency F: f0 sits where f is absent.
std::pair<GridFunction, GridFunction> planted_pair(int J, double F) {
  const auto a = oracle::sampled(J, [F](double x) { return 2.0 * std::max(0.0, std::cos(2.0 * std::numbers::pi * F * x) - 0.5); });
  const auto b = oracle::sampled(J, [F](double x) { return 2.0 * std::max(0.0, -std::cos(2.0 * std::numbers::pi * F * x) - 0.5); });
  return {a, b};
}

}  // namespace

TEST_CASE("scan bound and default shift range") {
  CHECK(scan_bound(0.5, 1) == 1024);
  CHECK(scan_bound(0.25, 1) == 1048576);
  CHECK(scan_bound(0.5, 3) == 1073741824);
  CHECK(scan_bound(0.1, 3) == std::numeric_limits<int>::max());
  CHECK(default_shift_range(0.25) == 6);
  CHECK(default_shift_range(0.1) == 10);
}

TEST_CASE("lower bound check") {
  const int J = 10;
  for (int m = 1; m <= 3; ++m) {
    const auto r = lower_bound_check(GridFunction(J, 0.3), std::vector<int>(m + 1, 2), m);
    CHECK(r.lhs == doctest::Approx(std::pow(0.3, m + 1)));
    CHECK(r.rhs == doctest::Approx(std::pow(0.3, m + 1)));
    CHECK(r.c == std::ldexp(1.0, -(m + 1)));
    CHECK(r.pass);
    const auto h = lower_bound_check(oracle::half_indicator(J), std::vector<int>(m + 1, 1), m);
    CHECK(h.rhs == doctest::Approx(std::pow(0.5, m + 1)));
    CHECK(h.lhs >= std::pow(0.5, m + 1) * std::ldexp(1.0, -(m + 1)));
  }
  Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const auto f = oracle::random_set(J, 0.3, 500 + trial).indicator();
    std::vector<int> scales(3);
    for (int& s : scales) s = static_cast<int>(rng.below(J - 1));
    CHECK(lower_bound_check(f, scales, 2).pass);
  }
  CHECK_THROWS_AS(lower_bound_check(GridFunction(J, 1.5), {1, 1}, 1), RangeError);
  CHECK_THROWS_AS(lower_bound_check(GridFunction(J, -0.1), {1, 1}, 1), RangeError);
  CHECK_THROWS_AS(lower_bound_check(GridFunction(J, 0.5), {1, 1, 1}, 1), RangeError);
  CHECK_THROWS_AS(lower_bound_check(GridFunction(J, 0.5), {1}, 0), RangeError);
}

TEST_CASE("good scale examples") {
  const int J = 12;
  const auto one = GridFunction(J, 1.0);
  const auto fam = parse_family("t, t^2");
  const std::vector<int> none{kNoMollification, kNoMollification};
  const auto r = find_good_scale(fam, one, one, none, 0.5, 5);
  REQUIRE(r.k_found);
  CHECK(*r.k_found == 0);
  CHECK(r.pairing_value == doctest::Approx(1.0));
  CHECK(r.m == 2);
  CHECK(r.constants.c_suite == 0.01);

  const auto half = oracle::half_indicator(J);
  const auto h = find_good_scale(fam, half, half, none, 0.5, 8);
  REQUIRE(h.k_found);
  CHECK(h.pairing_value >= 0.01 * 0.125);
  CHECK(*h.k_found <= h.scan_limit);
  for (const auto& [k, p] : h.trace) CHECK(p >= 0.0);

  CHECK_THROWS_AS(find_good_scale(fam, half, half, none, 0.6, 8), PreconditionError);
  CHECK_THROWS(find_good_scale(fam, half, half, {1}, 0.5, 8));
}

TEST_CASE("a tiny set still qualifies at the coarsest scale") {
  // With {t} at k = 0 the shift runs over the whole circle, so the pairing is |E|^2 exactly.
  const int J = 14;
  std::vector<std::uint32_t> cells;
  for (std::uint32_t j = 0; j < 64; ++j) cells.push_back(8000 + j);
  const auto f = DyadicSet(J, cells).indicator();
  const double eps = std::ldexp(1.0, -8);
  const auto r = find_good_scale(parse_family("t"), f, f, {kNoMollification}, eps, 13);
  REQUIRE(r.k_found);
  CHECK(*r.k_found == 0);
  CHECK(r.pairing_value == doctest::Approx(eps * eps).epsilon(1e-12));
  CHECK(r.scan_limit == 13);
}

TEST_CASE("random suite: scale found within the bound, monotone in epsilon") {
  const int J = 10;
  const char* families[] = {"t", "t, t^2", "t, t^2, t^3"};
  for (double eps : {0.5, 0.25, 0.1}) {
    for (int m = 1; m <= 3; ++m) {
      const auto fam = parse_family(families[m - 1]);
      const auto f = oracle::random_set(J, std::min(1.0, 1.3 * eps), 1000 + m).indicator();
      const auto f0 = oracle::random_set(J, std::min(1.0, 1.3 * eps), 2000 + m).indicator();
      const std::vector<int> t_list(m, J / 2);
      const auto r = find_good_scale(fam, f, f0, t_list, eps, J - 1, 512);
      REQUIRE(r.k_found);
      CHECK(*r.k_found <= scan_bound(eps, m));
      const auto weaker = find_good_scale(fam, f, f0, t_list, eps / 2, J - 1, 512);
      CHECK(weaker.k_found);
    }
  }
}

TEST_CASE("energy extraction gate") {
  const int J = 10;
  const auto one = GridFunction(J, 1.0);
  const auto r = energy_extraction(parse_family("t"), {one}, one, 2, 0.5);
  CHECK(r.gated);
  CHECK_FALSE(r.event);
  CHECK(r.candidates.empty());
}

TEST_CASE("planted frequency is extracted") {
  const int J = 12, k = 6;
  const auto [a, b] = planted_pair(J, std::ldexp(1.0, k - 3));
  const auto r = energy_extraction(parse_family("t"), {a}, b, k, 0.2);
  CHECK_FALSE(r.gated);
  CHECK(std::abs(r.pairing) < 1e-12);
  REQUIRE(r.event);
  CHECK(r.event->i == 0);
  CHECK(r.event->level == 2);
  CHECK(r.event->shift == -4);
  CHECK(r.event->norm >= 0.1);
  CHECK(r.threshold == doctest::Approx(0.01 * std::pow(0.2, 3.0)));
  // Search order: |shift| ascending, negative first.
  REQUIRE(r.candidates.size() == 2 * static_cast<std::size_t>(default_shift_range(0.2)) + 1);
  CHECK(r.candidates[0].shift == 0);
  CHECK(r.candidates[1].shift == -1);
  CHECK(r.candidates[2].shift == 1);
  for (const auto& c : r.candidates) CHECK(c.norm <= r.event->norm);
}

TEST_CASE("clipped annuli produce warnings") {
  const int J = 10;
  const auto [a, b] = planted_pair(J, 4);
  const auto r = energy_extraction(parse_family("t"), {a}, b, 7, 0.25);
  CHECK_FALSE(r.warnings.empty());
  for (const auto& c : r.candidates) {
    CHECK(c.level >= 0);
    CHECK(c.level <= J - 2);
  }
  CHECK_THROWS_AS(energy_extraction(parse_family("t"), {a}, b, 7, 0.25, -1), RangeError);
}

TEST_CASE("low-frequency inputs never trigger extraction") {
  const int J = 12, k = 8;
  const auto fam = parse_family("t, t^2");
  const int R = 2;
  // Spectrum inside |xi| <= 2^(k e_i - R - 2) for both slots.
  auto smooth = [&](std::uint64_t seed) {
    auto g = low_pass(oracle::random_signal(J, seed), std::int64_t{1} << (k - R - 2));
    g *= 0.25 / sup_norm(g);
    return g + GridFunction(J, 0.5);
  };
  const auto f1 = smooth(1), f2 = smooth(2);
  // A tiny f0 keeps the pairing under the gate.
  const auto f0 = GridFunction(J, 1e-9);
  const auto r = energy_extraction(fam, {f1, f2}, f0, k, 0.25, R);
  CHECK_FALSE(r.gated);
  CHECK_FALSE(r.event);
  for (const auto& c : r.candidates) CHECK(c.norm < 1e-12);
}

TEST_CASE("extraction norms aggregate under the square function") {
  const int J = 11;
  const auto f = random_bounded_function(J, 3, J - 2);
  for (int m : {2, 3}) {
    double agg = 0.0;
    for (int l = 0; l <= J - 2; l += 2) agg += std::pow(lp_norm(lp_piece(f, l), m), m);
    CHECK(agg <= std::pow(lp_norm(square_function(f), m), m) * (1 + 1e-12));
  }
  double all = 0.0;
  for (int l = 0; l <= J - 2; ++l) all += std::pow(lp_norm(lp_piece(f, l), 2.0), 2.0);
  CHECK(all == doctest::Approx(std::pow(lp_norm(square_function(f), 2.0), 2.0)).epsilon(1e-10));
}
