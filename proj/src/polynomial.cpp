#include "fracprog/polynomial.hpp"

#include <cctype>
#include <numeric>
#include <set>
#include <sstream>

#include "fracprog/errors.hpp"

namespace fracprog {

Rational::Rational(std::int64_t n, std::int64_t d) {
  if (d == 0) throw ConfigError("rational with zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  const std::int64_t g = std::gcd(n < 0 ? -n : n, d);
  num = g ? n / g : 0;
  den = g ? d / g : 1;
}

Rational operator+(Rational a, Rational b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
Rational operator-(Rational a, Rational b) { return {a.num * b.den - b.num * a.den, a.den * b.den}; }
Rational operator*(Rational a, Rational b) { return {a.num * b.num, a.den * b.den}; }
Rational operator/(Rational a, Rational b) {
  if (b.num == 0) throw RangeError("rational division by zero");
  return {a.num * b.den, a.den * b.num};
}

Rational parse_rational(std::string_view text) {
  std::string s(text);
  const auto slash = s.find('/');
  try {
    std::size_t used = 0;
    if (slash == std::string::npos) {
      const long long n = std::stoll(s, &used);
      if (used != s.size()) throw ConfigError("trailing characters");
      return Rational(n);
    }
    const long long n = std::stoll(s.substr(0, slash), &used);
    if (used != slash) throw ConfigError("trailing characters");
    const std::string ds = s.substr(slash + 1);
    const long long d = std::stoll(ds, &used);
    if (used != ds.size()) throw ConfigError("trailing characters");
    return Rational(n, d);
  } catch (const std::logic_error&) {
    throw ConfigError("not a rational number: '" + s + "'");
  }
}

std::string to_string(const Rational& r) {
  return r.den == 1 ? std::to_string(r.num) : std::to_string(r.num) + "/" + std::to_string(r.den);
}

Polynomial::Polynomial(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) {
  while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
  if (coeffs_.size() < 2) throw ConfigError("polynomial must be non-constant");
  if (!coeffs_[0].is_zero()) throw ConfigError("polynomial must vanish at t = 0");
  lowest_ = 1;
  while (coeffs_[lowest_].is_zero()) ++lowest_;
  real_.reserve(coeffs_.size());
  for (const auto& c : coeffs_) real_.push_back(c.value());
}

Polynomial Polynomial::monomial(int power, Rational coeff) {
  std::vector<Rational> c(static_cast<std::size_t>(power) + 1);
  c[power] = coeff;
  return Polynomial(std::move(c));
}

double Polynomial::operator()(double t) const {
  double acc = 0.0;
  for (std::size_t n = real_.size(); n-- > 0;) acc = acc * t + real_[n];
  return acc;
}

Rational Polynomial::coeff(int n) const {
  if (n < 0 || n >= static_cast<int>(coeffs_.size())) return Rational(0);
  return coeffs_[n];
}

std::string Polynomial::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (std::size_t n = 1; n < coeffs_.size(); ++n) {
    Rational c = coeffs_[n];
    if (c.is_zero()) continue;
    if (c.num < 0) {
      os << "-";
      c.num = -c.num;
    } else if (!first) {
      os << "+";
    }
    if (!(c.num == 1 && c.den == 1)) os << fracprog::to_string(c);
    os << "t";
    if (n > 1) os << "^" << n;
    first = false;
  }
  return os.str();
}

PolynomialFamily::PolynomialFamily(std::vector<Polynomial> polys) : polys_(std::move(polys)) {}

std::vector<int> PolynomialFamily::lowest_orders() const {
  std::vector<int> e;
  for (const auto& p : polys_) e.push_back(p.lowest_order());
  return e;
}

std::vector<int> PolynomialFamily::degrees() const {
  std::vector<int> d;
  for (const auto& p : polys_) d.push_back(p.degree());
  return d;
}

bool PolynomialFamily::relatively_curved() const {
  std::set<int> seen;
  for (const auto& p : polys_)
    if (!seen.insert(p.lowest_order()).second) return false;
  return true;
}

PolynomialFamily PolynomialFamily::without(std::size_t i) const {
  if (i >= polys_.size()) throw RangeError("family index out of range");
  std::vector<Polynomial> rest;
  for (std::size_t j = 0; j < polys_.size(); ++j)
    if (j != i) rest.push_back(polys_[j]);
  return PolynomialFamily(std::move(rest));
}

std::string PolynomialFamily::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < polys_.size(); ++i) {
    if (i) s += ",";
    s += polys_[i].to_string();
  }
  return s;
}

namespace {

class FamilyParser {
 public:
  explicit FamilyParser(std::string_view text) : s_(text) {}

  PolynomialFamily parse() {
    std::vector<Polynomial> polys;
    skip_ws();
    if (at_end()) fail("empty family");
    while (true) {
      polys.push_back(parse_poly());
      skip_ws();
      if (at_end()) break;
      if (s_[pos_] != ',') fail("expected ',' or end of input");
      ++pos_;
    }
    return PolynomialFamily(std::move(polys));
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("family grammar error at column " + std::to_string(pos_ + 1) + ": " + msg +
                      " (expected e.g. \"t, t^2-2t^3\")");
  }
  bool at_end() const { return pos_ >= s_.size(); }
  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool peek_digit() const { return !at_end() && std::isdigit(static_cast<unsigned char>(s_[pos_])); }

  std::int64_t parse_uint() {
    if (!peek_digit()) fail("expected digits");
    std::int64_t v = 0;
    while (peek_digit()) {
      v = v * 10 + (s_[pos_] - '0');
      if (v > (std::int64_t{1} << 40)) fail("number too large");
      ++pos_;
    }
    return v;
  }

  Polynomial parse_poly() {
    std::vector<Rational> coeffs(2);
    skip_ws();
    if (at_end() || s_[pos_] == ',') fail("empty polynomial");
    bool first = true;
    while (true) {
      skip_ws();
      int sign = 1;
      if (!at_end() && (s_[pos_] == '+' || s_[pos_] == '-')) {
        sign = s_[pos_] == '-' ? -1 : 1;
        ++pos_;
        skip_ws();
      } else if (!first) {
        break;
      }
      first = false;
      Rational c(1);
      bool has_coeff = false;
      if (peek_digit()) {
        const std::int64_t n = parse_uint();
        std::int64_t d = 1;
        if (!at_end() && s_[pos_] == '/') {
          ++pos_;
          d = parse_uint();
          if (d == 0) fail("zero denominator");
        }
        c = Rational(n, d);
        has_coeff = true;
        skip_ws();
        if (!at_end() && s_[pos_] == '*') {
          ++pos_;
          skip_ws();
        }
      }
      int power = 0;
      if (!at_end() && s_[pos_] == 't') {
        ++pos_;
        power = 1;
        skip_ws();
        if (!at_end() && s_[pos_] == '^') {
          ++pos_;
          skip_ws();
          power = static_cast<int>(parse_uint());
          if (power < 1 || power > 32) fail("exponent must be in 1..32");
        }
      } else if (!has_coeff) {
        fail("expected a term");
      }
      if (static_cast<int>(coeffs.size()) <= power) coeffs.resize(power + 1);
      coeffs[power] = coeffs[power] + Rational(sign) * c;
      skip_ws();
    }
    if (!coeffs[0].is_zero()) fail("polynomial must have zero constant term");
    try {
      return Polynomial(std::move(coeffs));
    } catch (const ConfigError& e) {
      fail(e.what());
    }
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

PolynomialFamily parse_family(std::string_view text) { return FamilyParser(text).parse(); }

}  // namespace fracprog
