#include "fracprog/numerics.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>

#include "fracprog/errors.hpp"

namespace fracprog {

LinearFit fit_line(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw RangeError("fit_line: mismatched lengths");
  const std::size_t n = xs.size();
  if (n < 2) throw RangeError("fit_line: need at least two points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0) throw RangeError("fit_line: degenerate abscissae");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  fit.points = n;
  return fit;
}

namespace {

// FFTW planning is not thread safe; execution on distinct buffers is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::vector<std::complex<double>> run_dft(std::span<const std::complex<double>> in, int sign) {
  const int n = static_cast<int>(in.size());
  if (n == 0) return {};
  fftw_complex* buf = fftw_alloc_complex(static_cast<std::size_t>(n));
  if (!buf) throw ResourceError("fftw allocation failed for n=" + std::to_string(n));
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_1d(n, buf, buf, sign, FFTW_ESTIMATE);
  }
  std::memcpy(static_cast<void*>(buf), static_cast<const void*>(in.data()), sizeof(fftw_complex) * static_cast<std::size_t>(n));
  fftw_execute(plan);
  std::vector<std::complex<double>> out(static_cast<std::size_t>(n));
  std::memcpy(static_cast<void*>(out.data()), static_cast<const void*>(buf), sizeof(fftw_complex) * static_cast<std::size_t>(n));
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(buf);
  return out;
}

}  // namespace

std::vector<std::complex<double>> forward_dft(std::span<const std::complex<double>> in) {
  auto out = run_dft(in, FFTW_FORWARD);
  const double scale = 1.0 / static_cast<double>(in.size());
  for (auto& c : out) c *= scale;
  return out;
}

std::vector<std::complex<double>> forward_dft_real(std::span<const double> in) {
  std::vector<std::complex<double>> c(in.begin(), in.end());
  return forward_dft(c);
}

std::vector<std::complex<double>> inverse_dft(std::span<const std::complex<double>> in) {
  return run_dft(in, FFTW_BACKWARD);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace fracprog
