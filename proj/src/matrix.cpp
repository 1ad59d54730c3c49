#include "polylab/matrix.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>

namespace polylab {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), entries_(rows * cols, fill) {
  if (!std::isfinite(fill)) throw std::domain_error("Matrix: non-finite fill value");
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows_ * cols_) {
    throw std::domain_error("Matrix: entry count does not match rows*cols");
  }
  if (!all_finite()) throw std::domain_error("Matrix: non-finite entry");
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> e;
  e.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw std::domain_error("Matrix::from_rows: ragged rows");
    e.insert(e.end(), row.begin(), row.end());
  }
  return Matrix(r, c, std::move(e));
}

bool Matrix::all_finite() const {
  return std::all_of(entries_.begin(), entries_.end(), [](double v) { return std::isfinite(v); });
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Vector Matrix::apply(std::span<const double> x) const {
  if (x.size() != cols_) throw std::domain_error("Matrix::apply: dimension mismatch");
  Vector y(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) y[i] = dot(row(i), x);
  return y;
}

Vector Matrix::apply_transpose(std::span<const double> y) const {
  if (y.size() != rows_) throw std::domain_error("Matrix::apply_transpose: dimension mismatch");
  Vector x(cols_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    const double yi = y[i];
    if (yi == 0.0) continue;
    const auto r = row(i);
    for (std::size_t j = 0; j < cols_; ++j) x[j] += yi * r[j];
  }
  return x;
}

Matrix Matrix::gram() const {
  Matrix g(cols_, cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    const auto r = row(i);
    for (std::size_t a = 0; a < cols_; ++a) {
      const double ra = r[a];
      if (ra == 0.0) continue;
      double* ga = &g(a, 0);
      for (std::size_t b = a; b < cols_; ++b) ga[b] += ra * r[b];
    }
  }
  for (std::size_t a = 0; a < cols_; ++a)
    for (std::size_t b = 0; b < a; ++b) g(a, b) = g(b, a);
  return g;
}

Matrix& Matrix::operator*=(double s) {
  for (double& v : entries_) v *= s;
  return *this;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm1(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += std::abs(v);
  return s;
}

double norm2(std::span<const double> a) {
  // Scaled accumulation so huge heavy-tailed entries do not overflow.
  double scale = 0.0;
  for (double v : a) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  for (double v : a) {
    const double t = v / scale;
    s += t * t;
  }
  return scale * std::sqrt(s);
}

double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

namespace {

void append_double(std::string& out, double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("to_chars failed");
  out.append(buf, ptr);
}

double parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::domain_error("CSV: cannot parse number '" + std::string(s) + "'");
  }
  return v;
}

std::string slurp(const std::filesystem::path& path, std::ios::openmode mode) {
  std::ifstream in(path, mode);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void put_u64_le(std::vector<unsigned char>& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<unsigned char>((v >> (8 * b)) & 0xffu));
}

std::uint64_t get_u64_le(std::span<const unsigned char> in) {
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(in[b]) << (8 * b);
  return v;
}

}  // namespace

std::string to_csv(const Matrix& m) {
  std::string out;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out.push_back(',');
      append_double(out, m(i, j));
    }
    out.push_back('\n');
  }
  return out;
}

Matrix from_csv(const std::string& text) {
  std::vector<double> entries;
  std::size_t rows = 0, cols = 0;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t count = 0;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      entries.push_back(parse_double(rest.substr(0, comma)));
      ++count;
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (rows == 0) cols = count;
    else if (count != cols) throw std::domain_error("CSV: ragged rows");
    ++rows;
  }
  return Matrix(rows, cols, std::move(entries));
}

void write_csv(const Matrix& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_csv(m);
}

Matrix read_csv(const std::filesystem::path& path) { return from_csv(slurp(path, std::ios::in)); }

std::vector<unsigned char> to_binary(const Matrix& m) {
  std::vector<unsigned char> out(kBinaryMagic, kBinaryMagic + 8);
  out.resize(16, 0);
  put_u64_le(out, m.rows());
  put_u64_le(out, m.cols());
  for (double v : m.entries()) put_u64_le(out, std::bit_cast<std::uint64_t>(v));
  return out;
}

Matrix from_binary(std::span<const unsigned char> bytes) {
  if (bytes.size() < 32 || std::memcmp(bytes.data(), kBinaryMagic, 8) != 0) {
    throw std::domain_error("binary matrix: bad magic header");
  }
  const std::uint64_t rows = get_u64_le(bytes.subspan(16));
  const std::uint64_t cols = get_u64_le(bytes.subspan(24));
  if (cols != 0 && rows > (bytes.size() - 32) / 8 / cols) {
    throw std::domain_error("binary matrix: truncated payload");
  }
  if (bytes.size() != 32 + rows * cols * 8) throw std::domain_error("binary matrix: size mismatch");
  std::vector<double> entries(rows * cols);
  for (std::size_t k = 0; k < entries.size(); ++k) {
    entries[k] = std::bit_cast<double>(get_u64_le(bytes.subspan(32 + 8 * k)));
  }
  return Matrix(rows, cols, std::move(entries));
}

void write_binary(const Matrix& m, const std::filesystem::path& path) {
  const auto bytes = to_binary(m);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

Matrix read_binary(const std::filesystem::path& path) {
  const std::string raw = slurp(path, std::ios::in | std::ios::binary);
  return from_binary({reinterpret_cast<const unsigned char*>(raw.data()), raw.size()});
}

std::string vector_to_csv(std::span<const double> v) {
  std::string out;
  for (double x : v) {
    append_double(out, x);
    out.push_back('\n');
  }
  return out;
}

}  // namespace polylab
