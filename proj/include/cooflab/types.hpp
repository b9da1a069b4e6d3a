#ifndef COOFLAB_TYPES_HPP
#define COOFLAB_TYPES_HPP

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cooflab {

using Complex = std::complex<double>;
using Bits = std::vector<std::uint8_t>;

/// Row-major matrix of complex symbols: rows are OFDM symbol instants,
/// columns are subcarriers.
class SymbolGrid {
 public:
  SymbolGrid() = default;
  SymbolGrid(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<Complex> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const Complex> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::vector<Complex>& values() { return data_; }
  const std::vector<Complex>& values() const { return data_; }

  /// Rows [first, first + count) as a new grid.
  SymbolGrid slice_rows(std::size_t first, std::size_t count) const;

  friend bool operator==(const SymbolGrid&, const SymbolGrid&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

/// Rejected configuration or argument; `field` names the offending input.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Malformed or truncated binary/text input.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cooflab

#endif  // COOFLAB_TYPES_HPP
