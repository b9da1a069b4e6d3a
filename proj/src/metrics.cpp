#include "cooflab/metrics.hpp"

#include <cmath>
#include <sstream>

#include "cooflab/text.hpp"

namespace cooflab {

BerCount count_ber(std::span<const std::uint8_t> tx_bits, std::span<const std::uint8_t> rx_bits) {
  if (tx_bits.size() != rx_bits.size()) throw std::invalid_argument("count_ber: length mismatch");
  BerCount out;
  out.n_bits = tx_bits.size();
  for (std::size_t i = 0; i < tx_bits.size(); ++i) out.n_errors += ((tx_bits[i] ^ rx_bits[i]) & 1u);
  out.ber = out.n_bits ? static_cast<double>(out.n_errors) / static_cast<double>(out.n_bits) : 0.0;
  return out;
}

double erfc_inv(double y) {
  if (!(y > 0.0 && y < 2.0)) throw std::domain_error("erfc_inv: argument must lie in (0, 2)");
  if (y == 1.0) return 0.0;
  if (y > 1.0) return -erfc_inv(2.0 - y);
  // Newton on log(erfc(x)) - log(y), which stays well scaled deep in the
  // tail, safeguarded by the bracket [lo, hi].
  double lo = 0.0;
  double hi = 1.0;
  while (std::erfc(hi) > y) hi *= 2.0;
  const double log_y = std::log(y);
  const double two_over_sqrt_pi = 2.0 / std::sqrt(3.14159265358979323846);
  double x = std::min(std::sqrt(std::max(0.0, -log_y)), 0.5 * (lo + hi));
  for (int it = 0; it < 200; ++it) {
    const double e = std::erfc(x);
    const double g = std::log(e) - log_y;
    if (g > 0.0) lo = x; else hi = x;
    const double dg = -two_over_sqrt_pi * std::exp(-x * x) / e;
    double next = x - g / dg;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-15 * std::max(1.0, std::abs(next))) return next;
    x = next;
  }
  return x;
}

double q_factor_db(double ber) {
  if (std::isnan(ber)) throw std::domain_error("q_factor_db: ber is NaN");
  if (ber <= 0.0) return std::numeric_limits<double>::infinity();
  if (ber >= 0.5) throw std::domain_error("q_factor_db: ber must be < 0.5");
  return 20.0 * std::log10(std::sqrt(2.0) * erfc_inv(2.0 * ber));
}

double q_ceiling_db(std::size_t n_bits) {
  if (n_bits == 0) throw std::invalid_argument("q_ceiling_db: no bits counted");
  return q_factor_db(1.0 / (2.0 * static_cast<double>(n_bits)));
}

namespace {
// BER >= 0.5 is reported at the Q of a coin flip rather than rejected.
double q_of_count(std::size_t errors, std::size_t bits) {
  if (errors == 0) return q_ceiling_db(bits);
  const double ber = static_cast<double>(errors) / static_cast<double>(bits);
  return ber >= 0.5 ? -std::numeric_limits<double>::infinity() : q_factor_db(ber);
}
}  // namespace

std::vector<double> per_subcarrier_q(const SymbolGrid& tx, const SymbolGrid& rx, const Constellation& c) {
  if (tx.rows() != rx.rows() || tx.cols() != rx.cols()) throw std::invalid_argument("per_subcarrier_q: shape mismatch");
  if (tx.rows() == 0) throw std::invalid_argument("per_subcarrier_q: no symbols");
  std::vector<double> q(tx.cols());
  std::vector<Complex> a(tx.rows());
  std::vector<Complex> b(tx.rows());
  for (std::size_t col = 0; col < tx.cols(); ++col) {
    for (std::size_t r = 0; r < tx.rows(); ++r) {
      a[r] = tx(r, col);
      b[r] = rx(r, col);
    }
    const auto cnt = count_ber(demap_symbols(a, c), demap_symbols(b, c));
    q[col] = q_of_count(cnt.n_errors, cnt.n_bits);
  }
  return q;
}

double evm_percent(std::span<const Complex> tx, std::span<const Complex> rx) {
  if (tx.size() != rx.size()) throw std::invalid_argument("evm: length mismatch");
  double err = 0.0;
  double ref = 0.0;
  for (std::size_t i = 0; i < tx.size(); ++i) {
    err += std::norm(rx[i] - tx[i]);
    ref += std::norm(tx[i]);
  }
  if (ref == 0.0) throw std::invalid_argument("evm: zero-power reference");
  return 100.0 * std::sqrt(err / ref);
}

double estimate_sinr_db(std::span<const Complex> tx, std::span<const Complex> rx) {
  const double evm = evm_percent(tx, rx) / 100.0;
  return evm == 0.0 ? std::numeric_limits<double>::infinity() : -20.0 * std::log10(evm);
}

std::string QualityReport::csv_header() {
  return "ber,q_factor_db,error_free,evm_percent,n_bits_counted,n_errors,min_subcarrier_q_db,max_subcarrier_q_db";
}

std::string QualityReport::csv_row() const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (double q : per_subcarrier_q) {
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  std::ostringstream os;
  os << format_double(ber) << ',' << format_double(q_factor_db) << ',' << (error_free ? 1 : 0) << ','
     << format_double(evm_percent) << ',' << n_bits_counted << ',' << n_errors << ','
     << format_double(per_subcarrier_q.empty() ? 0.0 : lo) << ',' << format_double(per_subcarrier_q.empty() ? 0.0 : hi);
  return os.str();
}

QualityReport assess(const SymbolGrid& tx, const SymbolGrid& rx, const Constellation& c) {
  if (tx.rows() != rx.rows() || tx.cols() != rx.cols()) throw std::invalid_argument("assess: shape mismatch");
  QualityReport r;
  const auto cnt = count_ber(demap_symbols(tx.values(), c), demap_symbols(rx.values(), c));
  r.ber = cnt.ber;
  r.n_errors = cnt.n_errors;
  r.n_bits_counted = cnt.n_bits;
  r.error_free = cnt.n_errors == 0;
  r.q_factor_db = q_of_count(cnt.n_errors, cnt.n_bits);
  r.per_subcarrier_q = per_subcarrier_q(tx, rx, c);
  r.evm_percent = evm_percent(tx.values(), rx.values());
  return r;
}

}  // namespace cooflab
