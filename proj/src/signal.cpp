#include "cooflab/signal.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <string>

namespace cooflab {

std::string_view to_string(Modulation m) {
  switch (m) {
    case Modulation::QPSK: return "qpsk";
    case Modulation::QAM16: return "qam16";
  }
  return "unknown";
}

Modulation modulation_from_string(std::string_view name) {
  if (name == "qpsk" || name == "QPSK") return Modulation::QPSK;
  if (name == "qam16" || name == "16qam" || name == "QAM16" || name == "16-QAM") return Modulation::QAM16;
  throw ConfigError("constellation", "unknown modulation '" + std::string(name) + "'");
}

namespace {

// Gray-coded PAM level for a 2-bit label.
double pam4_level(unsigned label) {
  switch (label) {
    case 0b00: return -3.0;
    case 0b01: return -1.0;
    case 0b11: return 1.0;
    default: return 3.0;
  }
}

}  // namespace

Constellation::Constellation(Modulation m, std::vector<Complex> points, unsigned bits)
    : modulation_(m), points_(std::move(points)), bits_per_symbol_(bits) {}

const Constellation& Constellation::get(Modulation m) {
  static const Constellation qpsk = [] {
    std::vector<Complex> pts(4);
    const double a = 1.0 / std::sqrt(2.0);
    for (unsigned label = 0; label < 4; ++label) {
      pts[label] = {(label & 0b10) ? -a : a, (label & 0b01) ? -a : a};
    }
    return Constellation(Modulation::QPSK, std::move(pts), 2);
  }();
  static const Constellation qam16 = [] {
    std::vector<Complex> pts(16);
    const double scale = 1.0 / std::sqrt(10.0);
    for (unsigned label = 0; label < 16; ++label) {
      pts[label] = {pam4_level(label >> 2) * scale, pam4_level(label & 0b11) * scale};
    }
    return Constellation(Modulation::QAM16, std::move(pts), 4);
  }();
  return m == Modulation::QPSK ? qpsk : qam16;
}

std::size_t Constellation::nearest(Complex z) const {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const double d = std::norm(z - points_[i]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

std::vector<Complex> map_bits(std::span<const std::uint8_t> bits, const Constellation& c) {
  const unsigned k = c.bits_per_symbol();
  if (bits.size() % k != 0) {
    throw std::invalid_argument("map_bits: " + std::to_string(bits.size()) + " bits not divisible by " +
                                std::to_string(k));
  }
  std::vector<Complex> out(bits.size() / k);
  const auto pts = c.points();
  for (std::size_t s = 0; s < out.size(); ++s) {
    unsigned label = 0;
    for (unsigned b = 0; b < k; ++b) label = (label << 1) | (bits[s * k + b] & 1u);
    out[s] = pts[label];
  }
  return out;
}

Bits demap_symbols(std::span<const Complex> symbols, const Constellation& c) {
  const unsigned k = c.bits_per_symbol();
  Bits out(symbols.size() * k);
  for (std::size_t s = 0; s < symbols.size(); ++s) {
    const auto label = static_cast<unsigned>(c.nearest(symbols[s]));
    for (unsigned b = 0; b < k; ++b) out[s * k + b] = static_cast<std::uint8_t>((label >> (k - 1 - b)) & 1u);
  }
  return out;
}

Bits prbs_generate(PrbsState& state, std::size_t n) {
  if ((state.reg & PrbsState::kMask) == 0) throw std::invalid_argument("prbs_generate: all-zero register");
  Bits out(n);
  std::uint32_t reg = state.reg & PrbsState::kMask;
  for (std::size_t i = 0; i < n; ++i) {
    const auto fb = static_cast<std::uint32_t>(std::popcount(reg & state.taps) & 1);
    reg = ((reg << 1) | fb) & PrbsState::kMask;
    out[i] = static_cast<std::uint8_t>(fb);
  }
  state.reg = reg;
  return out;
}

PrbsState prbs_state_from_seed(std::uint64_t seed) {
  PrbsState s;
  auto reg = static_cast<std::uint32_t>((seed ^ (seed >> 19) ^ (seed >> 38)) & PrbsState::kMask);
  s.reg = reg == 0 ? PrbsState::kMask : reg;
  return s;
}

}  // namespace cooflab
