#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace fracprog {

// Ordinary least squares y = slope x + intercept.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

LinearFit fit_line(std::span<const double> xs, std::span<const double> ys);

// Normalized forward DFT: out[k] = n^-1 sum_j in[j] e^{-2 pi i jk/n}. Any length n >= 1.
std::vector<std::complex<double>> forward_dft(std::span<const std::complex<double>> in);
std::vector<std::complex<double>> forward_dft_real(std::span<const double> in);
// Unnormalized inverse: out[j] = sum_k in[k] e^{+2 pi i jk/n}.
std::vector<std::complex<double>> inverse_dft(std::span<const std::complex<double>> in);

// SplitMix64 step; used for seed derivation so realizations are platform independent.
std::uint64_t splitmix64(std::uint64_t x);

// Small deterministic generator (SplitMix64 stream).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ull;
    return splitmix64(state_);
  }
  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  // Uniform in [0, n).
  std::uint64_t below(std::uint64_t n) { return n ? next() % n : 0; }

 private:
  std::uint64_t state_;
};

}  // namespace fracprog
