#ifndef COOFLAB_METRICS_HPP
#define COOFLAB_METRICS_HPP

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "cooflab/signal.hpp"
#include "cooflab/types.hpp"

namespace cooflab {

struct BerCount {
  double ber = 0.0;
  std::size_t n_errors = 0;
  std::size_t n_bits = 0;
};

BerCount count_ber(std::span<const std::uint8_t> tx_bits, std::span<const std::uint8_t> rx_bits);

/// Inverse complementary error function on (0, 2): Newton iterations on
/// log(std::erfc) safeguarded by bisection.
double erfc_inv(double y);

/// 20 log10(sqrt(2) erfcinv(2 ber)). Returns +inf for ber <= 0 and throws
/// for ber >= 0.5.
double q_factor_db(double ber);

/// Q reported for an error-free measurement over n_bits: q_factor_db(1 / (2 n_bits)).
double q_ceiling_db(std::size_t n_bits);

/// Per data subcarrier Q (column-wise BER over all rows); zero-error
/// subcarriers report q_ceiling_db of their bit count.
std::vector<double> per_subcarrier_q(const SymbolGrid& tx, const SymbolGrid& rx, const Constellation& c);

/// rms(rx - tx) / rms(tx) in percent.
double evm_percent(std::span<const Complex> tx, std::span<const Complex> rx);
/// -20 log10(evm); +inf when rx == tx.
double estimate_sinr_db(std::span<const Complex> tx, std::span<const Complex> rx);

struct QualityReport {
  double ber = 0.0;
  double q_factor_db = 0.0;  // finite: error-free runs report the counting ceiling
  bool error_free = false;
  std::vector<double> per_subcarrier_q;
  double evm_percent = 0.0;
  std::size_t n_bits_counted = 0;
  std::size_t n_errors = 0;

  static std::string csv_header();
  std::string csv_row() const;

  friend bool operator==(const QualityReport&, const QualityReport&) = default;
};

/// Hard-decision metrics of rx against tx (same shape, data subcarriers only).
QualityReport assess(const SymbolGrid& tx, const SymbolGrid& rx, const Constellation& c);

}  // namespace cooflab

#endif  // COOFLAB_METRICS_HPP
