#ifndef COOFLAB_SIGNAL_HPP
#define COOFLAB_SIGNAL_HPP

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "cooflab/types.hpp"

namespace cooflab {

enum class Modulation { QPSK, QAM16 };

std::string_view to_string(Modulation m);
Modulation modulation_from_string(std::string_view name);

/// Gray-labelled square constellation with unit average power.
///
/// Point index equals its bit label read MSB first. QPSK: first bit selects
/// the sign of I, second the sign of Q (0 -> positive), so "00" maps to
/// (1+i)/sqrt(2). 16-QAM: bits 0-1 Gray-code the I level and bits 2-3 the Q
/// level with 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3, scaled by 1/sqrt(10).
class Constellation {
 public:
  static const Constellation& get(Modulation m);

  Modulation modulation() const { return modulation_; }
  std::size_t order() const { return points_.size(); }
  unsigned bits_per_symbol() const { return bits_per_symbol_; }
  std::span<const Complex> points() const { return points_; }

  /// Index (== label) of the nearest point; ties go to the lowest index.
  std::size_t nearest(Complex z) const;

 private:
  Constellation(Modulation m, std::vector<Complex> points, unsigned bits);

  Modulation modulation_;
  std::vector<Complex> points_;
  unsigned bits_per_symbol_;
};

std::vector<Complex> map_bits(std::span<const std::uint8_t> bits, const Constellation& c);
Bits demap_symbols(std::span<const Complex> symbols, const Constellation& c);

/// Fibonacci LFSR for x^19 + x^18 + x^17 + x^14 + 1 (period 2^19 - 1).
/// Each step emits the feedback bit and shifts it into bit 0.
struct PrbsState {
  static constexpr std::uint32_t kMask = (1u << 19) - 1;
  static constexpr std::uint32_t kPrbs19Taps = (1u << 18) | (1u << 17) | (1u << 16) | (1u << 13);

  std::uint32_t reg = kMask;
  std::uint32_t taps = kPrbs19Taps;
};

/// Emits n bits and advances `state`; rejects an all-zero register.
Bits prbs_generate(PrbsState& state, std::size_t n);

/// Register value derived from an arbitrary seed (never zero).
PrbsState prbs_state_from_seed(std::uint64_t seed);

}  // namespace cooflab

#endif  // COOFLAB_SIGNAL_HPP
