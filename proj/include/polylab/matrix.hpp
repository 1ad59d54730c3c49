#pragma once

#include <cstddef>
#include <filesystem>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace polylab {

using Vector = std::vector<double>;

/// Dense real matrix, row-major.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  /// Takes ownership of a row-major entry array. Throws std::domain_error if
  /// the size does not match or an entry is not finite.
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

  static Matrix identity(std::size_t n);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return entries_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

  std::span<const double> row(std::size_t i) const {
    return {entries_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) { return {entries_.data() + i * cols_, cols_}; }

  const std::vector<double>& entries() const { return entries_; }

  bool all_finite() const;

  Matrix transpose() const;
  /// G x for x of length cols().
  Vector apply(std::span<const double> x) const;
  /// Gᵀ y for y of length rows().
  Vector apply_transpose(std::span<const double> y) const;
  /// Gᵀ G (cols × cols), symmetric.
  Matrix gram() const;

  Matrix& operator*=(double s);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> entries_;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm1(std::span<const double> a);
double norm2(std::span<const double> a);
double norm_inf(std::span<const double> a);

// Serialization.
//
// CSV: one matrix row per line, comma separated, '.' decimal, no header.
// Binary: 16-byte header (the ASCII magic "PLABMAT1" followed by 8 zero
// bytes), then little-endian u64 rows, u64 cols, then rows*cols little-endian
// IEEE-754 doubles in row-major order.

inline constexpr char kBinaryMagic[8] = {'P', 'L', 'A', 'B', 'M', 'A', 'T', '1'};

std::string to_csv(const Matrix& m);
Matrix from_csv(const std::string& text);
void write_csv(const Matrix& m, const std::filesystem::path& path);
Matrix read_csv(const std::filesystem::path& path);

std::vector<unsigned char> to_binary(const Matrix& m);
Matrix from_binary(std::span<const unsigned char> bytes);
void write_binary(const Matrix& m, const std::filesystem::path& path);
Matrix read_binary(const std::filesystem::path& path);

/// Vectors use the same CSV convention, one value per line.
std::string vector_to_csv(std::span<const double> v);

}  // namespace polylab
