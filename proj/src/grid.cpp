#include "fracprog/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>

#include "fracprog/errors.hpp"

namespace fracprog {

namespace {

void check_resolution(int J) {
  if (J < 1 || J > kMaxResolution)
    throw RangeError("resolution J=" + std::to_string(J) + " outside [1, " + std::to_string(kMaxResolution) + "]");
}

void check_same_grid(const GridFunction& a, const GridFunction& b) {
  if (a.resolution() != b.resolution()) throw RangeError("grid functions at different resolutions");
}

constexpr char kGridMagic[8] = {'F', 'R', 'A', 'C', 'G', 'R', 'I', 'D'};
constexpr char kSetMagic[8] = {'F', 'R', 'A', 'C', 'D', 'S', 'E', 'T'};

void put_u32(std::vector<char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

void put_u64(std::vector<char>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

class Reader {
 public:
  explicit Reader(std::span<const char> b) : b_(b) {}
  void magic(const char (&m)[8], const char* what) {
    need(8);
    if (std::memcmp(b_.data() + pos_, m, 8) != 0) throw ConfigError(std::string("bad magic: not a ") + what + " file");
    pos_ += 8;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{static_cast<unsigned char>(b_[pos_ + i])} << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{static_cast<unsigned char>(b_[pos_ + i])} << (8 * i);
    pos_ += 8;
    return v;
  }
  void finish() const {
    if (pos_ != b_.size()) throw ConfigError("trailing bytes in binary file");
  }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > b_.size()) throw ConfigError("truncated binary file");
  }
  std::span<const char> b_;
  std::size_t pos_ = 0;
};

std::vector<char> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void dump(const std::filesystem::path& path, const std::vector<char>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ConfigError("write failed for " + path.string());
}

}  // namespace

GridFunction::GridFunction(int J) : GridFunction(J, 0.0) {}

GridFunction::GridFunction(int J, double constant) : J_(J) {
  check_resolution(J);
  if (!std::isfinite(constant)) throw RangeError("non-finite grid value");
  values_.assign(std::size_t{1} << J, constant);
}

GridFunction::GridFunction(int J, std::vector<double> values) : J_(J), values_(std::move(values)) {
  check_resolution(J);
  if (values_.size() != (std::size_t{1} << J))
    throw RangeError("grid function needs exactly 2^J = " + std::to_string(std::size_t{1} << J) + " values, got " +
                     std::to_string(values_.size()));
  for (double v : values_)
    if (!std::isfinite(v)) throw RangeError("non-finite grid value");
}

bool GridFunction::is_nonnegative() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v >= 0.0; });
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
  check_same_grid(*this, other);
  for (std::size_t j = 0; j < values_.size(); ++j) values_[j] += other.values_[j];
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
  check_same_grid(*this, other);
  for (std::size_t j = 0; j < values_.size(); ++j) values_[j] -= other.values_[j];
  return *this;
}

GridFunction& GridFunction::operator*=(const GridFunction& other) {
  check_same_grid(*this, other);
  for (std::size_t j = 0; j < values_.size(); ++j) values_[j] *= other.values_[j];
  return *this;
}

GridFunction& GridFunction::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(GridFunction a, const GridFunction& b) { return a *= b; }
GridFunction operator*(GridFunction a, double s) { return a *= s; }

DyadicSet::DyadicSet(int J, std::vector<std::uint32_t> cells) : J_(J), cells_(std::move(cells)) {
  check_resolution(J);
  std::sort(cells_.begin(), cells_.end());
  cells_.erase(std::unique(cells_.begin(), cells_.end()), cells_.end());
  if (!cells_.empty() && cells_.back() >= grid_size())
    throw RangeError("cell index " + std::to_string(cells_.back()) + " outside grid of 2^" + std::to_string(J));
}

DyadicSet DyadicSet::full(int J) {
  check_resolution(J);
  std::vector<std::uint32_t> c(std::size_t{1} << J);
  for (std::size_t j = 0; j < c.size(); ++j) c[j] = static_cast<std::uint32_t>(j);
  return {J, std::move(c)};
}

DyadicSet DyadicSet::support(const GridFunction& f, double threshold) {
  std::vector<std::uint32_t> c;
  for (std::size_t j = 0; j < f.size(); ++j)
    if (f[j] > threshold) c.push_back(static_cast<std::uint32_t>(j));
  return {f.resolution(), std::move(c)};
}

bool DyadicSet::contains(std::int64_t cell) const {
  if (cell < 0 || cell >= static_cast<std::int64_t>(grid_size())) return false;
  return std::binary_search(cells_.begin(), cells_.end(), static_cast<std::uint32_t>(cell));
}

GridFunction DyadicSet::indicator() const {
  GridFunction f(J_);
  for (auto c : cells_) f[c] = 1.0;
  return f;
}

std::vector<std::uint8_t> DyadicSet::mask() const {
  std::vector<std::uint8_t> m(grid_size(), 0);
  for (auto c : cells_) m[c] = 1;
  return m;
}

double integrate(const GridFunction& f) {
  double s = 0.0;
  for (double v : f.values()) s += v;
  return s * f.cell_width();
}

double sup_norm(const GridFunction& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

double lp_norm(const GridFunction& f, double p) {
  if (std::isinf(p)) return sup_norm(f);
  if (!(p > 0)) throw RangeError("lp_norm needs p > 0");
  double s = 0.0;
  for (double v : f.values()) s += std::pow(std::abs(v), p);
  return std::pow(s * f.cell_width(), 1.0 / p);
}

GridFunction conditional_expectation(const GridFunction& f, int k) {
  const int J = f.resolution();
  if (k < 0 || k > J) throw RangeError("conditional_expectation scale k=" + std::to_string(k) + " outside [0, J]");
  const std::size_t block = std::size_t{1} << (J - k);
  std::vector<double> out(f.size());
  for (std::size_t b = 0; b < f.size(); b += block) {
    double s = 0.0;
    for (std::size_t j = b; j < b + block; ++j) s += f[j];
    const double mean = s / static_cast<double>(block);
    std::fill(out.begin() + static_cast<std::ptrdiff_t>(b), out.begin() + static_cast<std::ptrdiff_t>(b + block),
              mean);
  }
  return {J, std::move(out)};
}

std::int64_t displacement_cells(double y, int J) {
  return static_cast<std::int64_t>(std::ceil(std::ldexp(y, J)));
}

GridFunction cyclic_shift(const GridFunction& f, std::int64_t shift) {
  const std::size_t n = f.size();
  std::vector<double> out(n);
  const std::size_t s = displaced_index(0, shift, n);  // index read at j = 0
  for (std::size_t j = 0; j < n; ++j) out[j] = f[(j + s) & (n - 1)];
  return {f.resolution(), std::move(out)};
}

GridFunction sample_displaced(const GridFunction& f, double t, const Polynomial& P) {
  return cyclic_shift(f, displacement_cells(P(t), f.resolution()));
}

std::vector<char> encode_grid(const GridFunction& f) {
  std::vector<char> out(kGridMagic, kGridMagic + 8);
  out.reserve(12 + 8 * f.size());
  put_u32(out, static_cast<std::uint32_t>(f.resolution()));
  for (double v : f.values()) put_u64(out, std::bit_cast<std::uint64_t>(v));
  return out;
}

GridFunction decode_grid(std::span<const char> bytes) {
  Reader r(bytes);
  r.magic(kGridMagic, "FRACGRID");
  const std::uint32_t J = r.u32();
  if (J < 1 || J > static_cast<std::uint32_t>(kMaxResolution)) throw ConfigError("FRACGRID resolution out of range");
  std::vector<double> v(std::size_t{1} << J);
  for (double& x : v) x = std::bit_cast<double>(r.u64());
  r.finish();
  return {static_cast<int>(J), std::move(v)};
}

std::vector<char> encode_set(const DyadicSet& set) {
  std::vector<char> out(kSetMagic, kSetMagic + 8);
  put_u32(out, static_cast<std::uint32_t>(set.resolution()));
  put_u32(out, static_cast<std::uint32_t>(set.count()));
  for (auto c : set.cells()) put_u32(out, c);
  return out;
}

DyadicSet decode_set(std::span<const char> bytes) {
  Reader r(bytes);
  r.magic(kSetMagic, "FRACDSET");
  const std::uint32_t J = r.u32();
  if (J < 1 || J > static_cast<std::uint32_t>(kMaxResolution)) throw ConfigError("FRACDSET resolution out of range");
  const std::uint32_t count = r.u32();
  if (count > (std::uint32_t{1} << J)) throw ConfigError("FRACDSET count exceeds grid size");
  std::vector<std::uint32_t> cells(count);
  for (auto& c : cells) c = r.u32();
  r.finish();
  if (!std::is_sorted(cells.begin(), cells.end()) ||
      std::adjacent_find(cells.begin(), cells.end()) != cells.end())
    throw ConfigError("FRACDSET cells must be strictly increasing");
  return {static_cast<int>(J), std::move(cells)};
}

void write_grid(const std::filesystem::path& path, const GridFunction& f) { dump(path, encode_grid(f)); }
GridFunction read_grid(const std::filesystem::path& path) { return decode_grid(slurp(path)); }
void write_set(const std::filesystem::path& path, const DyadicSet& set) { dump(path, encode_set(set)); }
DyadicSet read_set(const std::filesystem::path& path) { return decode_set(slurp(path)); }

}  // namespace fracprog
