#ifndef COOFLAB_OFDM_HPP
#define COOFLAB_OFDM_HPP

#include <vector>

#include "cooflab/types.hpp"
#include "cooflab/waveform.hpp"

namespace cooflab {

/// Modem geometry. Data and pilot subcarriers occupy a contiguous block of
/// bins symmetric around DC with DC unused; pilots are spread evenly over
/// each half of the block.
struct OfdmConfig {
  std::size_t ifft_size = 512;
  std::size_t n_data_subcarriers = 210;
  std::size_t n_pilot_subcarriers = 8;
  double cp_fraction = 0.02;
  double sample_rate = 25e9;
  std::size_t n_preamble_symbols = 2;

  std::size_t cp_samples() const;
  std::size_t symbol_length() const { return ifft_size + cp_samples(); }
  std::size_t n_active() const { return n_data_subcarriers + n_pilot_subcarriers; }
  double subcarrier_spacing() const { return sample_rate / static_cast<double>(ifft_size); }
  /// Bandwidth spanned by the active bins.
  double occupied_bandwidth() const { return static_cast<double>(n_active() + 1) * subcarrier_spacing(); }

  void validate() const;
};

/// Placement of the active subcarriers. Columns of demodulated grids follow
/// `bins` (ascending frequency); data subcarrier d lives at column
/// data_columns[d].
struct SubcarrierMap {
  std::vector<int> bins;                 // signed bin index per active column
  std::vector<std::size_t> data_columns;
  std::vector<std::size_t> pilot_columns;
};

SubcarrierMap make_subcarrier_map(const OfdmConfig& cfg);

struct OfdmFrame {
  SymbolGrid preamble;  // n_preamble x n_active
  SymbolGrid payload;   // n_payload x n_data
  SymbolGrid pilots;    // n_payload x n_pilot

  std::size_t n_payload() const { return payload.rows(); }
};

/// Known preamble and pilot symbols (unit-modulus QPSK).
SymbolGrid known_preamble(const OfdmConfig& cfg);
SymbolGrid known_pilots(const OfdmConfig& cfg, std::size_t n_symbols);

/// Wraps payload symbols with the known preamble and pilots.
OfdmFrame make_frame(const SymbolGrid& payload, const OfdmConfig& cfg);

/// Preamble then payload symbols, each IFFT'd with its cyclic prefix.
/// Output has unit mean power for unit-power subcarrier symbols.
SampledWaveform ofdm_modulate(const OfdmFrame& frame, const OfdmConfig& cfg);

/// CP removal and FFT per symbol; returns every OFDM symbol (preamble
/// included) over the active columns. Exact inverse of ofdm_modulate.
SymbolGrid ofdm_demodulate(const SampledWaveform& w, const OfdmConfig& cfg);

/// Splits a demodulated grid back into preamble, payload and pilots.
OfdmFrame split_grid(const SymbolGrid& grid, const OfdmConfig& cfg);

/// Frequency-domain all-pass exp(-i beta2/2 w^2 L - ...) undoing linear
/// dispersion (including slope) over length_km.
SampledWaveform cd_compensate(const SampledWaveform& w, const FiberParams& p, double length_km);

struct ChannelEstimate {
  std::vector<Complex> taps;         // per data subcarrier
  std::vector<Complex> pilot_taps;   // per pilot subcarrier
  std::vector<double> cpe_per_symbol;  // radians, per payload symbol
};

/// One-tap estimate from the preamble, common phase error from the pilots.
ChannelEstimate estimate_channel(const OfdmFrame& rx, const OfdmConfig& cfg);

}  // namespace cooflab

#endif  // COOFLAB_OFDM_HPP
