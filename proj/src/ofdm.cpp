#include "cooflab/ofdm.hpp"

#include <cmath>
#include <string>

#include "cooflab/fft.hpp"
#include "cooflab/signal.hpp"

namespace cooflab {

namespace {

constexpr std::uint32_t kPreambleRegister = 0x1ACE5;
constexpr std::uint32_t kPilotRegister = 0x2B0B1;

SymbolGrid known_qpsk_grid(std::uint32_t reg, std::size_t rows, std::size_t cols) {
  PrbsState state;
  state.reg = reg;
  const auto bits = prbs_generate(state, rows * cols * 2);
  const auto symbols = map_bits(bits, Constellation::get(Modulation::QPSK));
  SymbolGrid g(rows, cols);
  std::copy(symbols.begin(), symbols.end(), g.values().begin());
  return g;
}

std::size_t fft_bin(int bin, std::size_t n) {
  return bin >= 0 ? static_cast<std::size_t>(bin) : n - static_cast<std::size_t>(-bin);
}

double modulator_gain(const OfdmConfig& cfg) { return 1.0 / std::sqrt(static_cast<double>(cfg.n_active())); }

}  // namespace

std::size_t OfdmConfig::cp_samples() const {
  return static_cast<std::size_t>(std::floor(cp_fraction * static_cast<double>(ifft_size)));
}

void OfdmConfig::validate() const {
  if (ifft_size < 4) throw ConfigError("modem.ifft_size", "must be >= 4");
  if (n_data_subcarriers == 0) throw ConfigError("modem.n_data_subcarriers", "must be >= 1");
  if (n_active() % 2 != 0) throw ConfigError("modem.n_data_subcarriers", "data + pilot count must be even (symmetric map)");
  if (n_pilot_subcarriers % 2 != 0) throw ConfigError("modem.n_pilot_subcarriers", "must be even (symmetric map)");
  if (n_active() > ifft_size - 1 || n_active() / 2 >= ifft_size / 2) {
    throw ConfigError("modem.n_data_subcarriers", "data + pilots exceed the usable ifft_size - 1 bins");
  }
  if (!(cp_fraction >= 0.0 && cp_fraction < 1.0)) throw ConfigError("modem.cp_fraction", "must be in [0, 1)");
  if (cp_samples() < 1) throw ConfigError("modem.cp_fraction", "cyclic prefix rounds to zero samples");
  if (!(sample_rate > 0.0)) throw ConfigError("modem.sample_rate", "must be > 0");
  if (n_preamble_symbols == 0) throw ConfigError("modem.n_preamble_symbols", "at least one preamble symbol is required");
}

SubcarrierMap make_subcarrier_map(const OfdmConfig& cfg) {
  cfg.validate();
  const std::size_t half = cfg.n_active() / 2;
  const std::size_t pilots_per_half = cfg.n_pilot_subcarriers / 2;
  std::vector<bool> is_pilot(cfg.n_active(), false);
  for (std::size_t j = 0; j < pilots_per_half; ++j) {
    const auto pos = static_cast<std::size_t>(std::floor((static_cast<double>(j) + 0.5) *
                                                         static_cast<double>(half) /
                                                         static_cast<double>(pilots_per_half)));
    is_pilot[half - 1 - pos] = true;  // bin -(pos + 1)
    is_pilot[half + pos] = true;      // bin +(pos + 1)
  }
  SubcarrierMap map;
  map.bins.reserve(cfg.n_active());
  for (std::size_t c = 0; c < cfg.n_active(); ++c) {
    const int bin = c < half ? -static_cast<int>(half - c) : static_cast<int>(c - half + 1);
    map.bins.push_back(bin);
    (is_pilot[c] ? map.pilot_columns : map.data_columns).push_back(c);
  }
  return map;
}

SymbolGrid known_preamble(const OfdmConfig& cfg) {
  return known_qpsk_grid(kPreambleRegister, cfg.n_preamble_symbols, cfg.n_active());
}

SymbolGrid known_pilots(const OfdmConfig& cfg, std::size_t n_symbols) {
  return known_qpsk_grid(kPilotRegister, n_symbols, cfg.n_pilot_subcarriers);
}

OfdmFrame make_frame(const SymbolGrid& payload, const OfdmConfig& cfg) {
  if (payload.cols() != cfg.n_data_subcarriers) {
    throw std::invalid_argument("make_frame: payload has " + std::to_string(payload.cols()) +
                                " columns, expected " + std::to_string(cfg.n_data_subcarriers));
  }
  return {known_preamble(cfg), payload, known_pilots(cfg, payload.rows())};
}

SampledWaveform ofdm_modulate(const OfdmFrame& frame, const OfdmConfig& cfg) {
  const auto map = make_subcarrier_map(cfg);
  if (frame.preamble.rows() != cfg.n_preamble_symbols || frame.preamble.cols() != cfg.n_active()) {
    throw std::invalid_argument("ofdm_modulate: preamble dimensions do not match the config");
  }
  if (frame.payload.cols() != cfg.n_data_subcarriers || frame.pilots.cols() != cfg.n_pilot_subcarriers ||
      frame.pilots.rows() != frame.payload.rows()) {
    throw std::invalid_argument("ofdm_modulate: payload/pilot dimensions do not match the config");
  }
  const std::size_t n = cfg.ifft_size;
  const std::size_t cp = cfg.cp_samples();
  const std::size_t n_symbols = frame.preamble.rows() + frame.payload.rows();
  const double g = modulator_gain(cfg);

  SampledWaveform out;
  out.sample_rate = cfg.sample_rate;
  out.samples.resize(n_symbols * (n + cp));
  FftWorkspace ws(n);
  auto buf = ws.data();
  for (std::size_t s = 0; s < n_symbols; ++s) {
    std::fill(buf.begin(), buf.end(), Complex{});
    if (s < frame.preamble.rows()) {
      for (std::size_t c = 0; c < map.bins.size(); ++c) buf[fft_bin(map.bins[c], n)] = frame.preamble(s, c);
    } else {
      const std::size_t t = s - frame.preamble.rows();
      for (std::size_t d = 0; d < map.data_columns.size(); ++d) {
        buf[fft_bin(map.bins[map.data_columns[d]], n)] = frame.payload(t, d);
      }
      for (std::size_t p = 0; p < map.pilot_columns.size(); ++p) {
        buf[fft_bin(map.bins[map.pilot_columns[p]], n)] = frame.pilots(t, p);
      }
    }
    ws.inverse();
    Complex* dst = out.samples.data() + s * (n + cp);
    for (std::size_t i = 0; i < cp; ++i) dst[i] = g * buf[n - cp + i];
    for (std::size_t i = 0; i < n; ++i) dst[cp + i] = g * buf[i];
  }
  return out;
}

SymbolGrid ofdm_demodulate(const SampledWaveform& w, const OfdmConfig& cfg) {
  const auto map = make_subcarrier_map(cfg);
  const std::size_t n = cfg.ifft_size;
  const std::size_t len = cfg.symbol_length();
  if (w.size() % len != 0) {
    throw std::invalid_argument("ofdm_demodulate: waveform length " + std::to_string(w.size()) +
                                " is not a multiple of the symbol duration " + std::to_string(len));
  }
  const std::size_t n_symbols = w.size() / len;
  const double scale = 1.0 / (modulator_gain(cfg) * static_cast<double>(n));
  SymbolGrid grid(n_symbols, cfg.n_active());
  FftWorkspace ws(n);
  auto buf = ws.data();
  for (std::size_t s = 0; s < n_symbols; ++s) {
    const Complex* src = w.samples.data() + s * len + cfg.cp_samples();
    std::copy(src, src + n, buf.begin());
    ws.forward();
    for (std::size_t c = 0; c < map.bins.size(); ++c) grid(s, c) = buf[fft_bin(map.bins[c], n)] * scale;
  }
  return grid;
}

OfdmFrame split_grid(const SymbolGrid& grid, const OfdmConfig& cfg) {
  const auto map = make_subcarrier_map(cfg);
  if (grid.cols() != cfg.n_active() || grid.rows() < cfg.n_preamble_symbols) {
    throw std::invalid_argument("split_grid: grid does not match the config");
  }
  const std::size_t n_payload = grid.rows() - cfg.n_preamble_symbols;
  OfdmFrame f{grid.slice_rows(0, cfg.n_preamble_symbols), SymbolGrid(n_payload, cfg.n_data_subcarriers),
              SymbolGrid(n_payload, cfg.n_pilot_subcarriers)};
  for (std::size_t t = 0; t < n_payload; ++t) {
    const std::size_t r = t + cfg.n_preamble_symbols;
    for (std::size_t d = 0; d < map.data_columns.size(); ++d) f.payload(t, d) = grid(r, map.data_columns[d]);
    for (std::size_t p = 0; p < map.pilot_columns.size(); ++p) f.pilots(t, p) = grid(r, map.pilot_columns[p]);
  }
  return f;
}

SampledWaveform cd_compensate(const SampledWaveform& w, const FiberParams& p, double length_km) {
  if (!(length_km >= 0.0)) throw std::invalid_argument("cd_compensate: length must be >= 0");
  if (length_km == 0.0 || w.samples.empty()) return w;
  const double length_m = length_km * 1e3;
  const double b2 = p.beta2();
  const double b3 = p.beta3();
  const std::size_t n = w.size();
  FftWorkspace ws(n);
  auto buf = ws.data();
  std::copy(w.samples.begin(), w.samples.end(), buf.begin());
  ws.forward();
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double omega = 2.0 * phys::kPi * (bin_frequency(k, n, w.sample_rate) + w.center_freq_offset);
    const double phase = -(b2 / 2.0 * omega * omega - b3 / 6.0 * omega * omega * omega) * length_m;
    buf[k] *= std::polar(inv_n, phase);
  }
  ws.inverse();
  SampledWaveform out = w;
  std::copy(buf.begin(), buf.end(), out.samples.begin());
  return out;
}

ChannelEstimate estimate_channel(const OfdmFrame& rx, const OfdmConfig& cfg) {
  const auto map = make_subcarrier_map(cfg);
  if (rx.preamble.rows() == 0) throw std::invalid_argument("estimate_channel: no preamble symbols");
  const auto ref = known_preamble(cfg);
  if (rx.preamble.rows() != ref.rows() || rx.preamble.cols() != ref.cols()) {
    throw std::invalid_argument("estimate_channel: preamble dimensions do not match the config");
  }
  std::vector<Complex> all(cfg.n_active());
  for (std::size_t c = 0; c < cfg.n_active(); ++c) {
    Complex acc{};
    for (std::size_t r = 0; r < ref.rows(); ++r) {
      if (std::abs(ref(r, c)) == 0.0) throw std::invalid_argument("estimate_channel: zero-magnitude reference symbol");
      acc += rx.preamble(r, c) / ref(r, c);
    }
    all[c] = acc / static_cast<double>(ref.rows());
  }
  ChannelEstimate est;
  for (auto c : map.data_columns) est.taps.push_back(all[c]);
  for (auto c : map.pilot_columns) est.pilot_taps.push_back(all[c]);

  const auto pilots_ref = known_pilots(cfg, rx.payload.rows());
  est.cpe_per_symbol.assign(rx.payload.rows(), 0.0);
  if (cfg.n_pilot_subcarriers > 0) {
    for (std::size_t t = 0; t < rx.payload.rows(); ++t) {
      Complex acc{};
      for (std::size_t p = 0; p < cfg.n_pilot_subcarriers; ++p) {
        acc += rx.pilots(t, p) * std::conj(est.pilot_taps[p] * pilots_ref(t, p));
      }
      est.cpe_per_symbol[t] = std::abs(acc) > 0.0 ? std::arg(acc) : 0.0;
    }
  }
  return est;
}

}  // namespace cooflab
