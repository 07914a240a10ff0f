#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace fracprog {

// Exact rational in lowest terms with positive denominator.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d = 1);  // NOLINT(google-explicit-constructor)

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool is_zero() const { return num == 0; }

  friend Rational operator+(Rational a, Rational b);
  friend Rational operator-(Rational a, Rational b);
  friend Rational operator*(Rational a, Rational b);
  friend Rational operator/(Rational a, Rational b);
  friend bool operator==(const Rational&, const Rational&) = default;
};

// Parses "p" or "p/q" (optional sign).
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& r);

// Real polynomial with rational coefficients and zero constant term:
// P(t) = sum_{n=e}^{d} a_n t^n with a_e != 0.
class Polynomial {
 public:
  // coeffs[n] is the coefficient of t^n; coeffs[0] must be zero.
  explicit Polynomial(std::vector<Rational> coeffs);

  static Polynomial monomial(int power, Rational coeff = Rational(1));

  double operator()(double t) const;

  int lowest_order() const { return lowest_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<Rational>& coeffs() const { return coeffs_; }
  Rational coeff(int n) const;

  std::string to_string() const;

 private:
  std::vector<Rational> coeffs_;
  std::vector<double> real_;
  int lowest_ = 1;
};

class PolynomialFamily {
 public:
  explicit PolynomialFamily(std::vector<Polynomial> polys);

  std::size_t size() const { return polys_.size(); }
  const Polynomial& operator[](std::size_t i) const { return polys_[i]; }
  const std::vector<Polynomial>& polys() const { return polys_; }

  std::vector<int> lowest_orders() const;
  std::vector<int> degrees() const;

  // True iff the lowest vanishing orders are pairwise distinct.
  bool relatively_curved() const;

  // The family with the i-th polynomial dropped (i is zero-based).
  PolynomialFamily without(std::size_t i) const;

  std::string to_string() const;

 private:
  std::vector<Polynomial> polys_;
};

// Grammar: comma-separated polynomials in t, e.g. "t, t^2-2t^3", "1/2t^2 + t".
// Throws ConfigError with a position-tagged diagnostic.
PolynomialFamily parse_family(std::string_view text);

}  // namespace fracprog
