#pragma once

// Discrete model of functions and measures on the torus R/Z at resolution 2^-J.
// The value at index j represents the cell [j 2^-J, (j+1) 2^-J) (left endpoint).

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "fracprog/polynomial.hpp"

namespace fracprog {

inline constexpr int kDefaultResolution = 14;
inline constexpr int kMinResolution = 4;
inline constexpr int kMaxResolution = 26;

class GridFunction {
 public:
  // Zero function.
  explicit GridFunction(int J);
  GridFunction(int J, double constant);
  GridFunction(int J, std::vector<double> values);

  int resolution() const { return J_; }
  std::size_t size() const { return values_.size(); }
  double cell_width() const { return 1.0 / static_cast<double>(values_.size()); }

  double operator[](std::size_t j) const { return values_[j]; }
  double& operator[](std::size_t j) { return values_[j]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  std::vector<double> release() && { return std::move(values_); }

  // Left endpoint of cell j.
  double point(std::size_t j) const { return static_cast<double>(j) * cell_width(); }

  bool is_nonnegative() const;

  GridFunction& operator+=(const GridFunction& other);
  GridFunction& operator-=(const GridFunction& other);
  GridFunction& operator*=(const GridFunction& other);
  GridFunction& operator*=(double s);

  friend bool operator==(const GridFunction&, const GridFunction&) = default;

 private:
  int J_;
  std::vector<double> values_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(GridFunction a, const GridFunction& b);
GridFunction operator*(GridFunction a, double s);

// Union of dyadic cells at resolution 2^-J.
class DyadicSet {
 public:
  // Cells are sorted and deduplicated; every index must be < 2^J.
  DyadicSet(int J, std::vector<std::uint32_t> cells);

  static DyadicSet full(int J);
  // Cells where f > threshold.
  static DyadicSet support(const GridFunction& f, double threshold = 0.0);

  int resolution() const { return J_; }
  std::size_t grid_size() const { return std::size_t{1} << J_; }
  const std::vector<std::uint32_t>& cells() const { return cells_; }
  std::size_t count() const { return cells_.size(); }
  bool empty() const { return cells_.empty(); }
  bool contains(std::int64_t cell) const;

  // Lebesgue measure of the union.
  double measure() const { return static_cast<double>(cells_.size()) / static_cast<double>(grid_size()); }

  GridFunction indicator() const;
  // Membership lookup table of length 2^J.
  std::vector<std::uint8_t> mask() const;

 private:
  int J_;
  std::vector<std::uint32_t> cells_;
};

// Riemann sum 2^-J sum_j f_j.
double integrate(const GridFunction& f);

// (integral |f|^p)^(1/p); p = infinity gives the sup norm.
double lp_norm(const GridFunction& f, double p);
double sup_norm(const GridFunction& f);

// Block means over dyadic intervals of length 2^-k.
GridFunction conditional_expectation(const GridFunction& f, int k);

// Number of cells a displacement y moves a left-endpoint sample:
// floor((x - y) 2^J) = j - ceil(y 2^J) for x = j 2^-J.
std::int64_t displacement_cells(double y, int J);

// Index of the cell containing (x_j - y) mod 1.
inline std::size_t displaced_index(std::size_t j, std::int64_t shift, std::size_t n) {
  const std::int64_t m = static_cast<std::int64_t>(n);
  std::int64_t idx = (static_cast<std::int64_t>(j) - shift) % m;
  if (idx < 0) idx += m;
  return static_cast<std::size_t>(idx);
}

// g(x) = f((x - shift 2^-J) mod 1).
GridFunction cyclic_shift(const GridFunction& f, std::int64_t shift);

// g(x) = f((x - P(t)) mod 1), periodized left-endpoint lookup.
GridFunction sample_displaced(const GridFunction& f, double t, const Polynomial& P);

// Binary formats (little-endian):
//   "FRACGRID" | u32 J | 2^J f64
//   "FRACDSET" | u32 J | u32 count | count u32 sorted cell indices
void write_grid(const std::filesystem::path& path, const GridFunction& f);
GridFunction read_grid(const std::filesystem::path& path);
void write_set(const std::filesystem::path& path, const DyadicSet& set);
DyadicSet read_set(const std::filesystem::path& path);

std::vector<char> encode_grid(const GridFunction& f);
GridFunction decode_grid(std::span<const char> bytes);
std::vector<char> encode_set(const DyadicSet& set);
DyadicSet decode_set(std::span<const char> bytes);

}  // namespace fracprog
