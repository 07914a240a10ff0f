#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fracprog/averages.hpp"
#include "fracprog/errors.hpp"
#include "fracprog/fourier.hpp"
#include "oracles.hpp"

using namespace fracprog;

namespace {

std::vector<double> midpoints(int k, std::size_t Q) {
  std::vector<double> t(Q);
  for (std::size_t q = 0; q < Q; ++q) t[q] = std::ldexp((static_cast<double>(q) + 0.5) / static_cast<double>(Q), -k);
  return t;
}

// Direct sum with functions vanishing outside [0, 1).
double zero_extended_at_point(const PolynomialFamily& fam, const std::vector<GridFunction>& fs,
                              const std::vector<double>& nodes, std::size_t j) {
  const int J = fs.front().resolution();
  const auto N = static_cast<long double>(std::size_t{1} << J);
  double s = 0.0;
  for (double t : nodes) {
    double prod = 1.0;
    for (std::size_t i = 0; i < fam.size(); ++i) {
      const auto cell = static_cast<std::int64_t>(j) - static_cast<std::int64_t>(std::ceil(static_cast<long double>(fam[i](t)) * N));
      prod *= (cell >= 0 && cell < static_cast<std::int64_t>(fs[i].size())) ? fs[i][static_cast<std::size_t>(cell)] : 0.0;
    }
    s += prod;
  }
  return s / static_cast<double>(nodes.size());
}

}  // namespace

TEST_CASE("averages agree with the direct sum") {
  const int J = 8;
  for (const char* text : {"t", "t, t^2", "t, 2t", "t, t^2, t^3", "1/2t^2 - t"}) {
    const auto fam = parse_family(text);
    std::vector<GridFunction> fs;
    for (std::size_t i = 0; i < fam.size(); ++i) fs.push_back(oracle::random_signal(J, 10 + i));
    for (int k : {0, 1, 3}) {
      const std::size_t Q = 300;
      const auto B = average(fam, fs, k, Q);
      const auto Bz = average(fam, fs, k, Q, Boundary::zero_extended);
      const auto nodes = midpoints(k, Q);
      for (std::size_t j = 0; j < B.size(); j += 7) {
        CHECK(B[j] == doctest::Approx(oracle::average_at_point(fam, fs, nodes, j)).epsilon(1e-12));
        CHECK(Bz[j] == doctest::Approx(zero_extended_at_point(fam, fs, nodes, j)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("average examples") {
  const int J = 9;
  const auto one = GridFunction(J, 1.0);
  const auto fam = parse_family("t, t^2");
  for (int k : {0, 2, 5}) {
    const auto B = average(fam, {one, one}, k);
    for (double v : B.values()) CHECK(v == doctest::Approx(1.0));
  }
  // A full period of a tone averages to zero.
  const auto c = oracle::sampled(J, [](double x) { return std::cos(2.0 * std::numbers::pi * x); });
  CHECK(sup_norm(average(parse_family("t"), {c}, 0)) < 1e-12);
  // Below the grid spacing every displacement is one cell.
  const auto f = oracle::random_signal(J, 3);
  const auto B = average(parse_family("t"), {f}, J + 2);
  for (std::size_t j = 0; j < f.size(); ++j) CHECK(B[j] == f[(j + f.size() - 1) % f.size()]);
  // Zero extension only loses mass.
  const auto Bz = average(fam, {one, one}, 0, 0, Boundary::zero_extended);
  for (std::size_t j = 0; j < Bz.size(); ++j) {
    CHECK(Bz[j] <= 1.0 + 1e-12);
    CHECK(Bz[j] >= 0.0);
  }
  CHECK(Bz[0] == 0.0);
}

TEST_CASE("averages are multilinear") {
  const int J = 8;
  const auto fam = parse_family("t, t^2");
  const auto f = oracle::random_signal(J, 1), g = oracle::random_signal(J, 2), h = oracle::random_signal(J, 3);
  const auto lhs = average(fam, {f * 2.0 + g, h}, 1, 256);
  const auto rhs = average(fam, {f, h}, 1, 256) * 2.0 + average(fam, {g, h}, 1, 256);
  for (std::size_t j = 0; j < lhs.size(); ++j) CHECK(lhs[j] == doctest::Approx(rhs[j]).epsilon(1e-12));
}

TEST_CASE("truncated and maximal averages") {
  const int J = 8;
  const auto fam = parse_family("t, 2t");
  const std::vector<GridFunction> fs{oracle::random_signal(J, 5), oracle::random_signal(J, 6)};
  const double kappa = 0.25;
  const std::size_t Q = 200;
  std::vector<double> nodes(Q);
  for (std::size_t q = 0; q < Q; ++q) nodes[q] = kappa + (1 - kappa) * (q + 0.5) / Q;
  const auto T = truncated_average(fam, fs, kappa, Q);
  for (std::size_t j = 0; j < T.size(); j += 5)
    CHECK(T[j] == doctest::Approx(oracle::average_at_point(fam, fs, nodes, j)).epsilon(1e-12));
  CHECK_THROWS_AS(truncated_average(fam, fs, 0.0, Q), RangeError);
  CHECK_THROWS_AS(truncated_average(fam, fs, 1.0, Q), RangeError);

  const auto M = maximal_average(fam, fs, 4, Q);
  for (int k = 1; k <= 4; ++k) {
    const auto B = average(fam, fs, k, Q);
    for (std::size_t j = 0; j < B.size(); ++j) CHECK(M[j] >= std::abs(B[j]));
  }
  CHECK_THROWS_AS(maximal_average(fam, fs, 0, Q), RangeError);
}

TEST_CASE("input validation") {
  const auto fam = parse_family("t, t^2");
  CHECK_THROWS(average(fam, {GridFunction(8, 1.0)}, 1));
  CHECK_THROWS(average(fam, {GridFunction(8, 1.0), GridFunction(9, 1.0)}, 1));
  CHECK_THROWS_AS(average(fam, {GridFunction(8, 1.0), GridFunction(8, 1.0)}, -1), RangeError);
}

TEST_CASE("spectral filters") {
  const int J = 10;
  const auto f = oracle::random_signal(J, 8);
  const auto lo = low_pass(f, 20), hi = high_pass(f, 20);
  const auto sum = lo + hi;
  for (std::size_t j = 0; j < f.size(); ++j) CHECK(sum[j] == doctest::Approx(f[j]));
  CHECK(spectral_radius(lo) == 20);
  const auto s = transform(hi);
  for (std::int64_t xi = -20; xi <= 20; ++xi) CHECK(std::abs(s.at(xi)) < 1e-14);
  CHECK(spectral_radius(GridFunction(J, 3.0)) == 0);

  const auto r = random_bounded_function(J, 4, 5);
  CHECK(sup_norm(r) <= 1.0);
  CHECK(std::ranges::equal(r.values(), random_bounded_function(J, 4, 5).values()));
}

TEST_CASE("low-frequency factorization") {
  const int J = 10;
  const auto fam = parse_family("t, t^2");
  const auto one = GridFunction(J, 1.0);
  const auto g = oracle::random_signal(J, 2);
  CHECK(lowfreq_factorization_error(fam, {one, g}, 0, 6, 2) < 1e-12);
  // Slot 0 must be band-limited to 2^(k - l).
  CHECK_THROWS_AS(lowfreq_factorization_error(fam, {oracle::random_signal(J, 1), g}, 0, 6, 2), PreconditionError);
  CHECK_THROWS_AS(lowfreq_factorization_error(fam, {one, g}, 2, 6, 2), RangeError);

  // The error shrinks as the band narrows.
  const int k = 8;
  double prev = 0.0;
  for (int l = 2; l <= 6; ++l) {
    auto f0 = low_pass(oracle::random_signal(J, 77), std::int64_t{1} << (k - l));
    f0 *= 1.0 / sup_norm(f0);
    auto f1 = random_bounded_function(J, 78, J - 2);
    const double err = lowfreq_factorization_error(fam, {f0, f1}, 0, k, l);
    if (l > 2) CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("Sobolev probe") {
  SobolevProbeOptions opt;
  opt.J = 9;
  opt.cutoffs = {2, 3, 4, 5};
  opt.trials = 2;
  const auto line = sobolev_probe(parse_family("t"), opt);
  REQUIRE(line.l1_norms.size() == 4);
  for (std::size_t i = 1; i < line.l1_norms.size(); ++i) CHECK(line.l1_norms[i] < line.l1_norms[i - 1]);
  CHECK(line.sigma_fit > 0.5);
  CHECK(line.relatively_curved);

  // t^2 forbids |xi| <= 2^(n + 2); at n = 6 that is the whole J = 9 spectrum for slot 1.
  opt.cutoffs = {2, 3, 6};
  const auto curved = sobolev_probe(parse_family("t, t^2"), opt);
  CHECK(curved.skipped == std::vector<std::pair<int, int>>{{6, 1}});
  CHECK(curved.l1_norms.size() == 3);

  const auto flat = sobolev_probe(parse_family("t, 2t"), SobolevProbeOptions{9, {2, 3, 4}, 1, 7, 1, ProbeInputs::random, 0});
  CHECK_FALSE(flat.relatively_curved);

  opt.cutoffs = {7, 8, 9};
  CHECK_THROWS_AS(sobolev_probe(parse_family("t"), opt), RangeError);
}
