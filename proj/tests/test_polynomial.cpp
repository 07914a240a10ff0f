#include <doctest.h>

#include "fracprog/errors.hpp"
#include "fracprog/polynomial.hpp"

using namespace fracprog;

TEST_CASE("rational arithmetic stays in lowest terms") {
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK(Rational(1, -3) == Rational(-1, 3));
  CHECK(Rational(1, 2) + Rational(1, 3) == Rational(5, 6));
  CHECK(Rational(1, 2) - Rational(1, 2) == Rational(0));
  CHECK(Rational(2, 3) * Rational(3, 4) == Rational(1, 2));
  CHECK(Rational(1, 2) / Rational(1, 4) == Rational(2));
  CHECK(Rational(3, 4).value() == doctest::Approx(0.75));
  CHECK_THROWS_AS(Rational(1, 0), ConfigError);
  CHECK_THROWS_AS(Rational(1) / Rational(0), RangeError);
}

TEST_CASE("parse_rational") {
  CHECK(parse_rational("3") == Rational(3));
  CHECK(parse_rational("-3/6") == Rational(-1, 2));
  CHECK(to_string(Rational(-1, 2)) == "-1/2");
  CHECK(to_string(Rational(4)) == "4");
  CHECK_THROWS_AS(parse_rational("1/"), ConfigError);
  CHECK_THROWS_AS(parse_rational("x"), ConfigError);
  CHECK_THROWS_AS(parse_rational("1/2z"), ConfigError);
}

TEST_CASE("polynomial evaluation and orders") {
  const Polynomial p({Rational(0), Rational(1), Rational(0), Rational(-2)});  // t - 2t^3
  CHECK(p(0.5) == doctest::Approx(0.25));
  CHECK(p.lowest_order() == 1);
  CHECK(p.degree() == 3);
  CHECK(p.coeff(3) == Rational(-2));
  CHECK(p.coeff(7) == Rational(0));
  const Polynomial q = Polynomial::monomial(2, Rational(1, 2));
  CHECK(q(3.0) == doctest::Approx(4.5));
  CHECK(q.lowest_order() == 2);
  CHECK_THROWS_AS(Polynomial({Rational(1), Rational(1)}), ConfigError);
  CHECK_THROWS_AS(Polynomial({Rational(0)}), ConfigError);
}

TEST_CASE("family grammar accepts the documented forms") {
  const auto fam = parse_family("t, t^2-2t^3");
  REQUIRE(fam.size() == 2);
  CHECK(fam.lowest_orders() == std::vector<int>{1, 2});
  CHECK(fam.degrees() == std::vector<int>{1, 3});
  CHECK(fam[1].coeff(3) == Rational(-2));
  CHECK(fam.relatively_curved());

  const auto half = parse_family("1/2t^2 + t");
  REQUIRE(half.size() == 1);
  CHECK(half[0].coeff(2) == Rational(1, 2));
  CHECK(half[0].coeff(1) == Rational(1));
  CHECK(half[0].lowest_order() == 1);

  CHECK_FALSE(parse_family("t,2t").relatively_curved());
  CHECK(parse_family("t,t^2,t^3").relatively_curved());
  CHECK_FALSE(parse_family("t^2, t^2+t^3").relatively_curved());
}

TEST_CASE("family round trip through to_string") {
  for (const char* text : {"t,t^2", "t,2t", "1/2t^2,t-2t^3", "-t^3"}) {
    const auto fam = parse_family(text);
    const auto again = parse_family(fam.to_string());
    REQUIRE(again.size() == fam.size());
    for (std::size_t i = 0; i < fam.size(); ++i) CHECK(again[i].coeffs() == fam[i].coeffs());
  }
}

TEST_CASE("family grammar rejects malformed input with a column") {
  for (const char* bad : {"t,", "", "1+t", "x", "t^", "t,,t^2", "t^0", "2"}) {
    CAPTURE(bad);
    try {
      parse_family(bad);
      FAIL("accepted malformed family");
    } catch (const ConfigError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("column") != std::string::npos);
    }
  }
}

TEST_CASE("without drops one polynomial") {
  const auto fam = parse_family("t,t^2,t^3");
  const auto rest = fam.without(1);
  REQUIRE(rest.size() == 2);
  CHECK(rest.lowest_orders() == std::vector<int>{1, 3});
  CHECK_THROWS_AS(fam.without(3), RangeError);
}
