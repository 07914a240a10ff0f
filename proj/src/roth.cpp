#include "fracprog/roth.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <sstream>

#include "fracprog/errors.hpp"
#include "fracprog/parallel.hpp"

namespace fracprog {

namespace {

constexpr const char* kModule = "roth-forms";

std::int64_t floor_div(std::int64_t x, std::int64_t d) {
  std::int64_t q = x / d;
  if ((x % d != 0) && ((x < 0) != (d < 0))) --q;
  return q;
}

std::int64_t pos_mod(std::int64_t x, std::int64_t n) {
  const std::int64_t r = x % n;
  return r < 0 ? r + n : r;
}

void check_same_grid(const GridFunction& a, const GridFunction& b, const GridFunction& c) {
  if (a.resolution() != b.resolution() || a.resolution() != c.resolution())
    throw PreconditionError(kModule, "form arguments at different resolutions");
}

void require_probability(const GridFunction& mu) {
  if (!mu.is_nonnegative()) throw PreconditionError(kModule, "mu has negative values");
  const double mass = integrate(mu);
  if (std::abs(mass - 1.0) > 1e-9)
    throw PreconditionError(kModule, "mu is not a probability density (mass " + std::to_string(mass) + ")");
}

}  // namespace

ThetaPair::ThetaPair(Rational t1, Rational t2, int M_) : theta1(t1), theta2(t2), M(M_) { validate(); }

void ThetaPair::validate() const {
  if (M < 1) throw RangeError("theta bound M must be >= 1");
  if (theta1 == theta2) throw PreconditionError(kModule, "degenerate theta pair: theta1 = theta2");
  for (const Rational& t : {theta1, theta2}) {
    if (t.is_zero()) throw PreconditionError(kModule, "theta entries must be nonzero");
    if (t.den > M) throw RangeError("theta " + fracprog::to_string(t) + " has denominator above M=" + std::to_string(M));
    if (std::abs(t.num) > static_cast<std::int64_t>(M) * t.den)
      throw RangeError("theta " + fracprog::to_string(t) + " lies outside [-M, M] for M=" + std::to_string(M));
  }
}

std::string ThetaPair::to_string() const { return fracprog::to_string(theta1) + "," + fracprog::to_string(theta2); }

ThetaPair parse_theta_pair(std::string_view text, std::optional<int> M) {
  const auto comma = text.find(',');
  if (comma == std::string_view::npos) throw ConfigError("theta pair must be written as \"p1/q1,p2/q2\"");
  const Rational t1 = parse_rational(text.substr(0, comma));
  const Rational t2 = parse_rational(text.substr(comma + 1));
  int bound = 1;
  for (const Rational& t : {t1, t2}) {
    bound = std::max<std::int64_t>(bound, t.den);
    bound = std::max<std::int64_t>(bound, (std::abs(t.num) + t.den - 1) / t.den);
  }
  return {t1, t2, M.value_or(bound)};
}

FormCoefficients form_coefficients(const ThetaPair& th) {
  th.validate();
  const std::int64_t L = std::lcm(th.theta1.den, th.theta2.den);
  const std::int64_t A1 = th.theta1.num * (L / th.theta1.den);
  const std::int64_t A2 = th.theta2.num * (L / th.theta2.den);
  FormCoefficients c{A2, -A1, A2 - A1};
  if (c.D < 0) c = {-c.a, -c.b, -c.D};
  const std::int64_t g = std::gcd(std::gcd(std::abs(c.a), std::abs(c.b)), c.D);
  c.a /= g;
  c.b /= g;
  c.D /= g;
  return c;
}

double trilinear_physical(const GridFunction& h, const GridFunction& g2, const GridFunction& g3, const ThetaPair& th) {
  check_same_grid(h, g2, g3);
  const FormCoefficients c = form_coefficients(th);
  const auto n = static_cast<std::int64_t>(h.size());
  const auto hv = h.values();
  const auto xv = g2.values();
  const auto tv = g3.values();
  std::vector<double> rows(static_cast<std::size_t>(n), 0.0);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      if (xv[j] == 0.0) continue;
      double s = 0.0;
      const std::int64_t base = c.a * static_cast<std::int64_t>(j);
      for (std::int64_t k = 0; k < n; ++k) {
        if (tv[static_cast<std::size_t>(k)] == 0.0) continue;
        const std::int64_t cell = pos_mod(floor_div(base + c.b * k, c.D), n);
        s += hv[static_cast<std::size_t>(cell)] * tv[static_cast<std::size_t>(k)];
      }
      rows[j] = s * xv[j];
    }
  });
  double total = 0.0;
  for (double r : rows) total += r;
  const double w = h.cell_width();
  return total * w * w;
}

double trilinear_fourier(const GridFunction& h, const GridFunction& g2, const GridFunction& g3, const ThetaPair& th) {
  check_same_grid(h, g2, g3);
  const FormCoefficients c = form_coefficients(th);
  const std::size_t n = h.size();
  const auto D = static_cast<std::size_t>(c.D);
  if (D > kMaxRefinedLength / n) {
    const int needed = h.resolution() + static_cast<int>(std::ceil(std::log2(static_cast<double>(D))));
    throw ResourceError("refined spectrum for theta=" + th.to_string() + " needs resolution J=" +
                        std::to_string(needed) + " (length " + std::to_string(D) + " * 2^" +
                        std::to_string(h.resolution()) + "), above the budget of 2^26");
  }
  const std::size_t M = D * n;

  std::vector<std::complex<double>> buf(M);
  for (std::size_t m = 0; m < M; ++m) buf[m] = h.values()[m / D];
  const auto H = forward_dft(buf);

  auto padded_spectrum = [&](const GridFunction& g) {
    std::fill(buf.begin(), buf.end(), std::complex<double>{});
    for (std::size_t j = 0; j < n; ++j) buf[j] = g.values()[j];
    auto S = forward_dft(buf);
    for (auto& v : S) v *= static_cast<double>(D);
    return S;
  };
  const auto S2 = padded_spectrum(g2);
  const auto S3 = padded_spectrum(g3);

  const auto Ms = static_cast<std::int64_t>(M);
  std::complex<double> total{};
  for (std::int64_t z = 0; z < Ms; ++z) {
    const auto i2 = static_cast<std::size_t>(pos_mod(-c.a * z, Ms));
    const auto i3 = static_cast<std::size_t>(pos_mod(-c.b * z, Ms));
    total += H[static_cast<std::size_t>(z)] * S2[i2] * S3[i3];
  }
  return total.real();
}

double lambda_physical(const GridFunction& h, const GridFunction& mu, const ThetaPair& th) {
  require_probability(mu);
  return trilinear_physical(h, mu, mu, th);
}

GridFunction level_low(const GridFunction& mu, int l) {
  if (l < 0) throw RangeError("level must be >= 0");
  return lp_low(mu, std::min(l, mu.resolution() - 1));
}

GridFunction level_piece(const GridFunction& mu, int l) {
  if (l < 0 || l > mu.resolution() - 1)
    throw RangeError("level " + std::to_string(l) + " outside [0, J-1] at J=" + std::to_string(mu.resolution()));
  if (l == 0) return lp_low(mu, 0);
  return lp_piece(mu, l - 1);
}

double lambda_fourier(const GridFunction& mu, const ThetaPair& th, std::optional<int> level) {
  require_probability(mu);
  if (!level) return trilinear_fourier(mu, mu, mu, th);
  return trilinear_fourier(level_piece(mu, *level), mu, mu, th);
}

double lambda_level(const GridFunction& mu, const ThetaPair& th, int l) {
  if (l < 1 || l > mu.resolution() - 1)
    throw RangeError("lambda_level needs 1 <= l <= J-1, got l=" + std::to_string(l));
  const GridFunction piece = level_piece(mu, l);
  const GridFunction p_l = level_low(mu, l);
  const GridFunction p_prev = level_low(mu, l - 1);
  return trilinear_fourier(piece, p_l, p_l, th) + trilinear_fourier(p_prev, piece, p_l, th) +
         trilinear_fourier(p_prev, p_prev, piece, th);
}

double chi_hat(double eta) {
  // (phi_hat * phi_hat)(eta) / phi_check(0)^2 with phi_check(0) = int phi_hat = 3.
  eta = std::abs(eta);
  if (eta >= 4.0) return 0.0;
  const double lo = std::max(-2.0, eta - 2.0);
  const double hi = std::min(2.0, eta + 2.0);
  constexpr int intervals = 2048;
  const double step = (hi - lo) / intervals;
  double s = 0.0;
  for (int i = 0; i <= intervals; ++i) {
    const double xi = lo + step * i;
    const double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    s += w * KernelPair::phi_hat(xi) * KernelPair::phi_hat(eta - xi);
  }
  return s * step / 3.0 / 9.0;
}

GridFunction diagonal_cutoff(int J, double delta, ChiProfile profile) {
  if (!(delta > 0.0 && delta < 0.25)) throw RangeError("delta must lie in (0, 1/4)");
  GridFunction out(J, 0.0);
  if (profile == ChiProfile::zero) return out;
  const std::size_t n = out.size();
  // Periodization of chi(z / delta) has coefficients delta * chi_hat(delta k), |k| < 4 / delta.
  const auto kmax = static_cast<std::int64_t>(std::ceil(4.0 / delta));
  std::vector<double> coeff(static_cast<std::size_t>(kmax) + 1);
  parallel_for(coeff.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) coeff[k] = delta * chi_hat(delta * static_cast<double>(k));
  });
  std::vector<std::complex<double>> spec(n);
  const auto ns = static_cast<std::int64_t>(n);
  for (std::int64_t k = -kmax; k <= kmax; ++k)
    spec[static_cast<std::size_t>(pos_mod(k, ns))] += coeff[static_cast<std::size_t>(std::abs(k))];
  const auto vals = inverse_dft(spec);
  std::vector<double> re(n);
  for (std::size_t j = 0; j < n; ++j) re[j] = std::max(0.0, vals[j].real());
  return {J, std::move(re)};
}

int diagonal_split_level(double delta, double beta, int J) {
  if (!(beta > 0.5)) throw PreconditionError(kModule, "diagonal split needs beta > 1/2, got " + std::to_string(beta));
  if (!(delta > 0.0 && delta < 1.0)) throw RangeError("delta must lie in (0, 1)");
  if (beta >= 1.0) return J - 1;
  double kappa = std::min(0.1, 2.0 * beta - 1.0 - 0.01);
  if (kappa <= 0.0) kappa = (2.0 * beta - 1.0) / 2.0;
  const double l0 = -std::log2(delta) * (beta - kappa) / (1.0 - beta);
  return static_cast<int>(std::clamp(std::ceil(l0), 0.0, static_cast<double>(J - 1)));
}

DiagonalMass diagonal_mass(const GridFunction& mu, const ThetaPair& th, double delta, double beta, ChiProfile profile) {
  require_probability(mu);
  const int J = mu.resolution();
  DiagonalMass out;
  out.delta = delta;
  out.l0 = diagonal_split_level(delta, beta, J);
  const GridFunction chi = diagonal_cutoff(J, delta, profile);
  if (profile == ChiProfile::zero) return out;
  out.low = trilinear_fourier(chi * level_low(mu, out.l0), mu, mu, th);
  out.total = out.low;
  for (int l = out.l0 + 1; l <= J - 1; ++l) {
    const double v = trilinear_fourier(chi * level_piece(mu, l), mu, mu, th);
    out.tail.emplace_back(l, v);
    out.total += v;
  }
  return out;
}

LinearFit diagonal_slope(const std::vector<DiagonalMass>& masses) {
  std::vector<double> xs, ys;
  for (const auto& d : masses) {
    if (!(d.total > 0.0)) continue;
    xs.push_back(std::log2(d.delta));
    ys.push_back(std::log2(d.total));
  }
  return fit_line(xs, ys);
}

RothReport roth_certificate(const GridFunction& mu, const FrostmanEstimate& frost, const ThetaPair& th, int l0,
                            const RothOptions& options) {
  require_probability(mu);
  const int J = mu.resolution();
  if (l0 < 0 || l0 > J - 1) throw RangeError("l0 must lie in [0, J-1]");
  if (options.deltas.empty()) throw RangeError("at least one delta is needed");
  if (frost.resolution != J) throw PreconditionError(kModule, "Frostman estimate computed at a different resolution");

  RothReport rep;
  rep.theta = th.to_string();
  rep.l0 = l0;
  rep.beta = frost.beta;

  const DecayProfile prof = decay_profile(mu, options.lmax.value_or(J - 2), frost.beta);
  rep.c0_fit = prof.c0_l4;
  rep.decay_threshold = *prof.threshold;
  rep.decay_ok = *prof.exceeds_threshold;

  const GridFunction low = level_low(mu, l0);
  rep.low_sup_norm = sup_norm(low);
  rep.lambda_low = trilinear_fourier(low, low, low, th);
  rep.lambda_total = rep.lambda_low;
  for (int l = l0 + 1; l <= J - 1; ++l) {
    const double v = lambda_level(mu, th, l);
    rep.tail.emplace_back(l, v);
    rep.lambda_total += v;
    rep.tail_abs_sum += std::abs(v);
  }
  {
    std::vector<double> ls, ys;
    for (auto [l, v] : rep.tail)
      if (std::abs(v) > 1e-14) {
        ls.push_back(l);
        ys.push_back(std::log2(std::abs(v)));
      }
    if (ls.size() >= 3) rep.tail_slope = fit_line(ls, ys).slope;
  }
  rep.tail_ok = rep.tail_abs_sum < rep.lambda_total / 2.0;

  std::vector<double> deltas = options.deltas;
  std::sort(deltas.begin(), deltas.end(), std::greater<>());
  if (frost.beta > 0.5) {
    for (double d : deltas) rep.diagonal.push_back(diagonal_mass(mu, th, d, frost.beta));
    rep.diagonal_ok = rep.diagonal.back().total < rep.lambda_total / 2.0;
    std::size_t positive = 0;
    for (const auto& d : rep.diagonal) positive += d.total > 0.0;
    if (positive >= 2) rep.diagonal_slope = diagonal_slope(rep.diagonal).slope;
  }

  std::ostringstream os;
  if (!rep.decay_ok) {
    os << "(a) fitted c0=" << rep.c0_fit << " does not exceed (1-beta)/4=" << rep.decay_threshold;
    rep.failures.push_back(os.str());
    os.str("");
  }
  if (!rep.tail_ok) {
    os << "(b) tail sum " << rep.tail_abs_sum << " is not below lambda_total/2=" << rep.lambda_total / 2.0;
    rep.failures.push_back(os.str());
    os.str("");
  }
  if (frost.beta <= 0.5) {
    rep.failures.push_back("(c) diagonal mass undefined: beta=" + std::to_string(frost.beta) + " <= 1/2");
  } else if (!rep.diagonal_ok) {
    os << "(c) diagonal mass " << rep.diagonal.back().total << " at delta=" << rep.diagonal.back().delta
       << " is not below lambda_total/2=" << rep.lambda_total / 2.0;
    rep.failures.push_back(os.str());
  }
  rep.pass = rep.failures.empty();
  return rep;
}

}  // namespace fracprog
