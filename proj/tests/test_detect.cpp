#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fracprog/detect.hpp"
#include "fracprog/errors.hpp"
#include "fracprog/measures.hpp"
#include "oracles.hpp"

using namespace fracprog;

TEST_CASE("t grid") {
  const auto n = t_grid_nodes(0.25, 4);
  REQUIRE(n.size() == 4);
  CHECK(n[0] == 0.25);
  CHECK(n[1] == 0.5);
  CHECK(n[2] == 0.75);
  CHECK(n[3] == 1.0);
  CHECK(t_grid_nodes(0.3, 1) == std::vector<double>{0.3});
  CHECK_THROWS_AS(t_grid_nodes(0.3, 0), RangeError);
  CHECK_THROWS_AS(t_grid_nodes(0.0, 4), RangeError);
  CHECK_THROWS_AS(t_grid_nodes(1.0, 4), RangeError);
  CHECK(default_kappa(12) == doctest::Approx(1.0 / 64));
}

TEST_CASE("full set") {
  const int J = 10;
  const auto E = DyadicSet::full(J);
  const auto fam = parse_family("t, t^2");
  const auto w = detect(E, fam, 0.25, 16);
  REQUIRE(w);
  // x - t must stay in [0, 1), so the first x is 1/4.
  CHECK(w->x == 0.25);
  CHECK(w->t == 0.25);
  CHECK(w->cells == std::vector<std::int64_t>{256, 0, 192});
  CHECK(w->nontrivial);
  CHECK(w->margin_cells == 0);
  CHECK(w->resolution == J);
  CHECK(verify_witness(E, fam, *w, 0.25));
  CHECK(average_certificate(E, fam, 0.25) == doctest::Approx(0.375).epsilon(0.01));
  CHECK(average_certificate(E, fam, 0.5) == doctest::Approx(0.25).epsilon(0.01));
}

TEST_CASE("single cell and far clusters") {
  const int J = 12;
  const auto fam = parse_family("t, t^2");
  const DyadicSet one(J, {1000});
  CHECK_FALSE(detect(one, fam, 0.1, 4096));
  std::vector<std::uint32_t> cells;
  for (std::uint32_t j = 0; j < 4; ++j) {
    cells.push_back(410 + j);
    cells.push_back(3277 + j);
  }
  const DyadicSet clusters(J, cells);
  CHECK_FALSE(detect(clusters, fam, 0.5, 65536));
  CHECK(average_certificate(clusters, fam, 0.5) < 1e-12);
  CHECK_THROWS_AS(average_certificate(DyadicSet(J, {}), fam, 0.5), PreconditionError);
}

TEST_CASE("linear family against pair enumeration") {
  const auto fam = parse_family("t, 2t");
  std::vector<DyadicSet> sets;
  sets.push_back(DyadicSet::support(cantor_measure({3, {0, 2}, 5, std::nullopt}, 9)));
  for (std::uint64_t seed = 0; seed < 9; ++seed) sets.push_back(oracle::random_set(8, 0.05 + 0.03 * seed, 40 + seed));
  for (const auto& E : sets) {
    const double kappa = 0.05;
    const std::size_t T = 777;
    const auto nodes = t_grid_nodes(kappa, T);
    const auto expect = oracle::linear_progression(E, nodes);
    const auto w = detect(E, fam, kappa, T);
    REQUIRE(w.has_value() == expect.has_value());
    if (!w) continue;
    CHECK(w->cells[0] == expect->x_cell);
    CHECK(w->t == nodes[expect->node]);
    CHECK(verify_witness(E, fam, *w, kappa));
  }
}

TEST_CASE("witnesses are sound and tampering is caught") {
  const auto fam = parse_family("t, t^2");
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto E = oracle::random_set(10, 0.6, seed);
    const auto w = detect(E, fam, 0.1, 512);
    REQUIRE(w);
    CHECK(verify_witness(E, fam, *w, 0.1));
    for (std::int64_t c : w->cells) CHECK(E.contains(c));
    CHECK(w->points.size() == 3);
    CHECK(w->margin == doctest::Approx(w->margin_cells * std::ldexp(1.0, -10)));
    CHECK_FALSE(verify_witness(E, fam, *w, w->t + 0.01));
    auto shifted = *w;
    shifted.cells[1] += 1;
    CHECK_FALSE(verify_witness(E, fam, shifted, 0.1));
  }
}

TEST_CASE("detection is monotone under inclusion") {
  const auto fam = parse_family("t, t^2");
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto small = oracle::random_set(9, 0.2, 300 + seed);
    auto cells = small.cells();
    const auto extra = oracle::random_set(9, 0.3, 400 + seed);
    cells.insert(cells.end(), extra.cells().begin(), extra.cells().end());
    const DyadicSet big(9, cells);
    if (detect(small, fam, 0.1, 256)) CHECK(detect(big, fam, 0.1, 256));
  }
}

TEST_CASE("positive certificate comes with a witness") {
  const int J = 10;
  const auto fam = parse_family("t, t^2");
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto E = oracle::random_set(J, 0.9, 700 + seed);
    const double kappa = default_kappa(J);
    const double cert = average_certificate(E, fam, kappa);
    CHECK(cert > 0.01);
    const auto w = detect(E, fam, kappa, 1024);
    REQUIRE(w);
    CHECK(verify_witness(E, fam, *w, kappa));
  }
}
