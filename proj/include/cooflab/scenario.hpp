#ifndef COOFLAB_SCENARIO_HPP
#define COOFLAB_SCENARIO_HPP

#include <optional>
#include <string>

#include "cooflab/config.hpp"
#include "cooflab/metrics.hpp"

namespace cooflab {

inline constexpr std::string_view kVersion = "cooflab 1.0.0";

/// Transmitted payload and received field of the channel under test. The
/// received waveform is at the simulation rate, after the receive filter,
/// local-oscillator phase noise and ADC.
struct LinkSimulation {
  ScenarioConfig config;
  SymbolGrid tx_payload;  // n_payload x n_data
  SampledWaveform received;
};

/// Payload symbols of channel `channel_index` (the centre channel uses the
/// channel seed itself).
SymbolGrid make_payload(const ScenarioConfig& cfg, std::size_t channel_index);

/// Transmitter, link and receiver front end. Deterministic in the seeds.
LinkSimulation simulate_link(const ScenarioConfig& cfg);
/// Rebuilds the transmit side around a previously recorded received field.
LinkSimulation replay_link(const ScenarioConfig& cfg, SampledWaveform received);

struct RunResult {
  std::string equalizer;  // EqualizerSpec::label()
  QualityReport quality;
  std::optional<TrainingRecord> training;
  std::string fingerprint;
  double wall_time_s = 0.0;
  std::string version;
  double net_bit_rate = 0.0;   // bit/s after preamble, pilots, CP and training
  SymbolGrid reference;        // transmitted symbols of the counted rows
  SymbolGrid equalized;        // equalizer output for the same rows
};

/// Receiver DSP for one equalizer: CD compensation or DBP, demodulation,
/// one-tap estimate, then the selected equalizer trained on the first
/// n_training_symbols payload rows. Metrics cover the remaining rows only.
RunResult evaluate_equalizer(const LinkSimulation& sim, const EqualizerSpec& eq);

/// Same, with equalizer and training taken from `receiver`, which must
/// describe the same link as sim.config (see link_key).
RunResult evaluate_receiver(const LinkSimulation& sim, const ScenarioConfig& receiver);

/// Canonical form of every setting that shapes the received field.
std::string link_key(const ScenarioConfig& cfg);

/// simulate_link followed by evaluate_equalizer with the configured equalizer.
RunResult run_scenario(const ScenarioConfig& cfg);

/// Payload bit rate after framing and training overhead.
double net_bit_rate(const ScenarioConfig& cfg);

}  // namespace cooflab

#endif  // COOFLAB_SCENARIO_HPP
