#include <cmath>

#include "cooflab/metrics.hpp"
#include "cooflab/random.hpp"
#include "cooflab/signal.hpp"
#include "doctest.h"

using namespace cooflab;

namespace {

// erfc^-1(y) computed by 300-step bisection on mpmath's erfc at 60 digits.
struct ErfcInvPair {
  double y;
  double x;
};
constexpr ErfcInvPair kErfcInvTable[] = {
    {1e-300, 26.209469960516124},   {1e-100, 15.065574702592646},   {1e-30, 8.1486162231698646},
    {1e-15, 5.675846347467647},     {1e-10, 4.5728249673894853},    {1e-6, 3.4589107372795},
    {1e-4, 2.7510639057120608},     {2e-3, 2.1851242191330043},     {0.01, 1.8213863677184497},
    {0.05, 1.3859038243496779},     {0.1, 1.1630871536766741},      {0.31731, 0.70710752324635584},
    {0.5, 0.47693627620446987},     {0.9, 0.088855990494257687},    {1.0, 0.0},
    {1.1, -0.088855990494257687},   {1.5, -0.47693627620446987},    {1.9, -1.1630871536766741},
    {1.99, -1.8213863677184497},    {1.9999, -2.7510639057120608},
};

SymbolGrid random_grid(std::size_t rows, std::size_t cols, Modulation m, std::uint64_t seed) {
  const auto& c = Constellation::get(m);
  Rng rng(seed);
  SymbolGrid g(rows, cols);
  for (auto& z : g.values()) z = c.points()[rng.next_u64() % c.order()];
  return g;
}

}  // namespace

TEST_CASE("bit error counting") {
  const Bits a(10000, 0);
  Bits b = a;
  CHECK(count_ber(a, b).ber == 0.0);
  b[17] = 1;
  const auto one = count_ber(a, b);
  CHECK(one.ber == 1e-4);
  CHECK(one.n_errors == 1);
  CHECK(one.n_bits == 10000);
  Bits inv(10000, 1);
  CHECK(count_ber(a, inv).ber == 1.0);
  CHECK_THROWS_AS(count_ber(a, Bits(9)), std::invalid_argument);
}

TEST_CASE("inverse complementary error function against reference values") {
  for (const auto& [y, x] : kErfcInvTable) {
    CAPTURE(y);
    const double got = erfc_inv(y);
    if (x == 0.0) {
      CHECK(std::abs(got) < 1e-15);
    } else {
      CHECK(std::abs(got - x) <= 1e-10 * std::abs(x));
    }
  }
  CHECK_THROWS_AS(erfc_inv(0.0), std::domain_error);
  CHECK_THROWS_AS(erfc_inv(2.0), std::domain_error);
}

TEST_CASE("Q factor reference points") {
  CHECK(std::abs(q_factor_db(1e-3) - 9.80) < 0.01);
  CHECK(std::abs(q_factor_db(0.158655)) < 0.01);
  CHECK(std::isinf(q_factor_db(0.0)));
  CHECK_THROWS_AS(q_factor_db(0.5), std::domain_error);
  CHECK_THROWS_AS(q_factor_db(0.7), std::domain_error);
  double previous = 1e9;
  for (double ber = 1e-12; ber < 0.5; ber *= 1.5) {
    const double q = q_factor_db(ber);
    CHECK(q < previous);
    previous = q;
  }
  CHECK(q_factor_db(0.4999999) < -50.0);
}

TEST_CASE("counting ceiling") {
  CHECK(q_ceiling_db(100000) == doctest::Approx(q_factor_db(5e-6)));
}

TEST_CASE("EVM and SINR") {
  std::vector<Complex> tx(100000);
  Rng rng(3);
  const auto& c = Constellation::get(Modulation::QAM16);
  for (auto& z : tx) z = c.points()[rng.next_u64() % 16];
  CHECK(evm_percent(tx, tx) == 0.0);
  CHECK(std::isinf(estimate_sinr_db(tx, tx)));
  std::vector<Complex> neg(tx);
  for (auto& z : neg) z = -z;
  CHECK(evm_percent(tx, neg) == doctest::Approx(200.0));
  std::vector<Complex> noisy(tx);
  for (auto& z : noisy) z += rng.complex_normal(0.01);
  CHECK(std::abs(estimate_sinr_db(tx, noisy) - 20.0) < 0.1);
  const std::vector<Complex> zero(4);
  CHECK_THROWS_AS(evm_percent(zero, zero), std::invalid_argument);
}

TEST_CASE("error-free grid reports the ceiling everywhere") {
  const auto& c = Constellation::get(Modulation::QPSK);
  const auto tx = random_grid(100, 210, Modulation::QPSK, 4);
  const auto r = assess(tx, tx, c);
  CHECK(r.ber == 0.0);
  CHECK(r.error_free);
  CHECK(r.n_bits_counted == 100 * 210 * 2);
  CHECK(r.q_factor_db == doctest::Approx(q_ceiling_db(r.n_bits_counted)));
  REQUIRE(r.per_subcarrier_q.size() == 210);
  for (double q : r.per_subcarrier_q) CHECK(q == doctest::Approx(q_ceiling_db(200)));
}

TEST_CASE("aggregate BER is the bit-weighted mean of per-subcarrier BER") {
  const auto& c = Constellation::get(Modulation::QAM16);
  const auto tx = random_grid(200, 210, Modulation::QAM16, 5);
  auto rx = tx;
  Rng rng(6);
  for (std::size_t t = 0; t < rx.rows(); ++t)
    for (std::size_t k = 0; k < rx.cols(); ++k) rx(t, k) += rng.complex_normal(0.01 + 0.05 * k / 210.0);
  const auto r = assess(tx, rx, c);
  std::size_t errors = 0;
  for (std::size_t k = 0; k < 210; ++k) {
    Bits a;
    Bits b;
    for (std::size_t t = 0; t < tx.rows(); ++t) {
      const auto ba = demap_symbols(std::span<const Complex>(&tx(t, k), 1), c);
      const auto bb = demap_symbols(std::span<const Complex>(&rx(t, k), 1), c);
      a.insert(a.end(), ba.begin(), ba.end());
      b.insert(b.end(), bb.begin(), bb.end());
    }
    const auto sub = count_ber(a, b);
    errors += sub.n_errors;
    if (sub.n_errors > 0) CHECK(r.per_subcarrier_q[k] == doctest::Approx(q_factor_db(sub.ber)));
  }
  CHECK(r.n_errors == errors);
  CHECK(r.ber == doctest::Approx(static_cast<double>(errors) / static_cast<double>(r.n_bits_counted)).epsilon(1e-12));
  CHECK(r.per_subcarrier_q.front() > r.per_subcarrier_q.back());
}

TEST_CASE("quality row has one field per header column") {
  const auto& c = Constellation::get(Modulation::QPSK);
  const auto tx = random_grid(3, 4, Modulation::QPSK, 7);
  const auto r = assess(tx, tx, c);
  const auto header = QualityReport::csv_header();
  const auto row = r.csv_row();
  CHECK(std::count(header.begin(), header.end(), ',') == std::count(row.begin(), row.end(), ','));
}
