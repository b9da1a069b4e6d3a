#ifndef COOFLAB_CONFIG_HPP
#define COOFLAB_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <string>

#include "cooflab/fiber.hpp"
#include "cooflab/network.hpp"
#include "cooflab/ofdm.hpp"
#include "cooflab/signal.hpp"
#include "cooflab/waveform.hpp"
#include "json.hpp"

namespace cooflab {

enum class EqualizerKind { Linear, Dbp, Ann, MimoDl };

std::string_view to_string(EqualizerKind k);
EqualizerKind equalizer_from_string(std::string_view s);

struct EqualizerSpec {
  EqualizerKind kind = EqualizerKind::MimoDl;
  GroupCase group_case = GroupCase::Case2;  // used by MimoDl
  std::size_t dbp_steps_per_span = 40;       // used by Dbp

  /// Short label such as "linear", "dbp40", "ann" or "mimo_dl_case2".
  std::string label() const;
};

struct WdmSpec {
  std::size_t n_channels = 5;  // channel n_channels / 2 is measured
  double spacing_hz = 12.5e9;
};

struct Impairments {
  bool nonlinearity = true;
  bool ase_noise = true;
  bool converters = true;
  bool phase_noise = true;
  double linewidth_hz = 1e5;
  ConverterParams converter;
};

struct Seeds {
  std::uint64_t channel = 1;   // payload bits of every channel
  std::uint64_t noise = 2;     // ASE and laser phase noise
  std::uint64_t training = 3;  // network initialization
};

/// One end-to-end experiment. Launch power in `link` is per channel.
struct ScenarioConfig {
  OfdmConfig modem;
  Modulation modulation = Modulation::QPSK;
  std::size_t oversampling = 4;  // channel samples per modem sample
  FiberParams fiber;
  LinkPlan link;
  WdmSpec wdm;
  Impairments impairments;
  EqualizerSpec equalizer;
  TrainingConfig training;
  Seeds seeds;
  std::size_t n_payload_symbols = 240;

  /// Carrier offset of channel k from the simulation centre frequency.
  double channel_offset(std::size_t k) const;
  std::size_t measured_channel() const { return wdm.n_channels / 2; }
  double simulation_rate() const { return modem.sample_rate * static_cast<double>(oversampling); }
  /// Payload rows used for training, at least one.
  std::size_t n_training_symbols() const;

  /// Rejects inconsistent combinations; ConfigError names the field.
  void validate() const;

  /// Defaults for the desk-scale WDM scenario.
  static ScenarioConfig defaults();
  /// Full-scale variant: 20 channels over 32 spans.
  static ScenarioConfig full_scale();
};

nlohmann::json to_json(const ScenarioConfig& cfg);
/// Missing keys keep their defaults; unknown keys are rejected.
ScenarioConfig config_from_json(const nlohmann::json& j, const ScenarioConfig& base = ScenarioConfig::defaults());

ScenarioConfig load_config(const std::filesystem::path& path);
void save_config(const ScenarioConfig& cfg, const std::filesystem::path& path);

/// Canonical serialization (sorted keys, shortest round-trip numbers).
std::string canonical_json(const ScenarioConfig& cfg);
/// 64-bit FNV-1a of canonical_json, as 16 hex digits.
std::string fingerprint(const ScenarioConfig& cfg);

}  // namespace cooflab

#endif  // COOFLAB_CONFIG_HPP
