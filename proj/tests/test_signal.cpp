#include <array>
#include <cmath>
#include <numeric>

#include "cooflab/random.hpp"
#include "cooflab/signal.hpp"
#include "doctest.h"

using namespace cooflab;

namespace {

constexpr std::size_t kPeriod = (1u << 19) - 1;

// Stage-array model of x^19 + x^18 + x^17 + x^14 + 1; stage 1 holds the
// newest bit.
struct ReferenceLfsr {
  std::array<int, 20> stage{};

  ReferenceLfsr() { stage.fill(1); }

  int next() {
    const int fb = stage[19] ^ stage[18] ^ stage[17] ^ stage[14];
    for (int k = 19; k > 1; --k) stage[k] = stage[k - 1];
    stage[1] = fb;
    return fb;
  }
};

Bits random_bits(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Bits b(n);
  for (auto& x : b) x = static_cast<std::uint8_t>(rng.next_u64() & 1u);
  return b;
}

}  // namespace

TEST_CASE("prbs matches the reference register bit for bit") {
  PrbsState s;
  const auto bits = prbs_generate(s, 5000);
  ReferenceLfsr ref;
  for (std::size_t i = 0; i < bits.size(); ++i) REQUIRE(bits[i] == ref.next());
}

TEST_CASE("prbs full period is balanced and repeats") {
  PrbsState s;
  const auto bits = prbs_generate(s, kPeriod);
  const auto ones = std::accumulate(bits.begin(), bits.end(), std::size_t{0});
  CHECK(ones == (1u << 18));
  CHECK(kPeriod - ones == (1u << 18) - 1);
  CHECK(s.reg == PrbsState{}.reg);
  const auto again = prbs_generate(s, 64);
  CHECK(std::equal(again.begin(), again.end(), bits.begin()));
}

TEST_CASE("prbs out-of-phase autocorrelation is -1") {
  PrbsState s;
  const auto bits = prbs_generate(s, kPeriod);
  for (std::size_t shift : {1u, 2u, 7u, 1000u, 262143u, 524286u}) {
    long long acc = 0;
    for (std::size_t i = 0; i < kPeriod; ++i) {
      const int a = bits[i] ? -1 : 1;
      const int b = bits[(i + shift) % kPeriod] ? -1 : 1;
      acc += a * b;
    }
    CHECK(acc == -1);
  }
}

TEST_CASE("prbs streaming equals one long call") {
  PrbsState a;
  PrbsState b;
  auto first = prbs_generate(a, 100);
  const auto second = prbs_generate(a, 100);
  first.insert(first.end(), second.begin(), second.end());
  CHECK(first == prbs_generate(b, 200));
}

TEST_CASE("prbs rejects an all-zero register") {
  PrbsState s;
  s.reg = 0;
  CHECK_THROWS_AS(prbs_generate(s, 1), std::invalid_argument);
  CHECK(prbs_state_from_seed(0).reg != 0);
  CHECK(prbs_state_from_seed(1u << 19).reg != 0);
}

TEST_CASE("constellations have unit power and Gray neighbours") {
  for (auto m : {Modulation::QPSK, Modulation::QAM16}) {
    const auto& c = Constellation::get(m);
    const auto pts = c.points();
    CHECK(pts.size() == (m == Modulation::QPSK ? 4u : 16u));
    double p = 0.0;
    for (auto z : pts) p += std::norm(z);
    CHECK(std::abs(p / static_cast<double>(pts.size()) - 1.0) < 1e-12);

    double dmin = 1e9;
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j) dmin = std::min(dmin, std::abs(pts[i] - pts[j]));
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t j = i + 1; j < pts.size(); ++j) {
        if (std::abs(std::abs(pts[i] - pts[j]) - dmin) < 1e-9) CHECK(std::popcount(i ^ j) == 1);
      }
    }
  }
}

TEST_CASE("qpsk 00 maps to the first quadrant") {
  const auto& c = Constellation::get(Modulation::QPSK);
  const Bits b{0, 0};
  const auto s = map_bits(b, c);
  REQUIRE(s.size() == 1);
  CHECK(std::abs(s[0] - Complex(1.0, 1.0) / std::sqrt(2.0)) < 1e-15);
  const std::vector<Complex> noisy{Complex(0.9, 0.8) / std::sqrt(2.0)};
  CHECK(demap_symbols(noisy, c) == b);
}

TEST_CASE("map then demap is the identity") {
  for (auto m : {Modulation::QPSK, Modulation::QAM16}) {
    const auto& c = Constellation::get(m);
    const auto bits = random_bits(4 * 5000, 11);
    const auto syms = map_bits(bits, c);
    CHECK(syms.size() == bits.size() / c.bits_per_symbol());
    CHECK(demap_symbols(syms, c) == bits);
    double p = 0.0;
    for (auto z : syms) p += std::norm(z);
    CHECK(p / static_cast<double>(syms.size()) == doctest::Approx(1.0).epsilon(0.03));
  }
}

TEST_CASE("map rejects a partial symbol") {
  const Bits b{1, 0, 1};
  CHECK_THROWS_AS(map_bits(b, Constellation::get(Modulation::QAM16)), std::invalid_argument);
}

TEST_CASE("small noise does not cause errors") {
  const auto& c = Constellation::get(Modulation::QAM16);
  const auto bits = random_bits(4000, 5);
  auto syms = map_bits(bits, c);
  Rng rng(9);
  for (auto& z : syms) z += rng.complex_normal(1e-6);
  CHECK(demap_symbols(syms, c) == bits);
}

TEST_CASE("ties go to the lowest index") {
  const auto& c = Constellation::get(Modulation::QPSK);
  CHECK(c.nearest(Complex(0.0, 0.0)) == 0);
}
