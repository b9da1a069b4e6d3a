#include "cooflab/scenario.hpp"

#include <chrono>
#include <cmath>

#include "cooflab/equalizers.hpp"
#include "cooflab/random.hpp"

namespace cooflab {

namespace {

enum Stream : std::uint64_t { kAseStream = 1, kLoStream = 2, kTxLaserStream = 100, kPayloadStream = 200 };

SampledWaveform transmit(const ScenarioConfig& cfg, const SymbolGrid& payload, std::size_t k) {
  auto w = ofdm_modulate(make_frame(payload, cfg.modem), cfg.modem);
  if (cfg.impairments.converters) w = dac_adc(w, cfg.impairments.converter);
  w = upsample(w, cfg.oversampling);
  if (cfg.impairments.phase_noise) {
    Rng rng(derive_seed(cfg.seeds.noise, kTxLaserStream + k));
    w = apply_phase_noise(w, cfg.impairments.linewidth_hz, rng);
  }
  return w;
}

SampledWaveform receive(const ScenarioConfig& cfg, const SampledWaveform& optical) {
  const double bandwidth = cfg.wdm.n_channels > 1 ? cfg.wdm.spacing_hz : cfg.modem.sample_rate;
  auto w = wdm_demux(optical, cfg.channel_offset(cfg.measured_channel()), bandwidth);
  if (cfg.impairments.phase_noise) {
    Rng rng(derive_seed(cfg.seeds.noise, kLoStream));
    w = apply_phase_noise(w, cfg.impairments.linewidth_hz, rng);
  }
  if (cfg.impairments.converters) w = dac_adc(w, cfg.impairments.converter);
  return w;
}

}  // namespace

SymbolGrid make_payload(const ScenarioConfig& cfg, std::size_t channel_index) {
  const auto& c = Constellation::get(cfg.modulation);
  const std::size_t centre = cfg.measured_channel();
  const auto seed =
      channel_index == centre ? cfg.seeds.channel : derive_seed(cfg.seeds.channel, kPayloadStream + channel_index);
  auto state = prbs_state_from_seed(seed);
  const std::size_t n_sym = cfg.n_payload_symbols * cfg.modem.n_data_subcarriers;
  const auto bits = prbs_generate(state, n_sym * c.bits_per_symbol());
  SymbolGrid grid(cfg.n_payload_symbols, cfg.modem.n_data_subcarriers);
  grid.values() = map_bits(bits, c);
  return grid;
}

LinkSimulation simulate_link(const ScenarioConfig& cfg) {
  cfg.validate();
  LinkSimulation sim;
  sim.config = cfg;
  sim.tx_payload = make_payload(cfg, cfg.measured_channel());

  std::vector<std::pair<SampledWaveform, double>> channels;
  for (std::size_t k = 0; k < cfg.wdm.n_channels; ++k) {
    const bool centre = k == cfg.measured_channel();
    const auto payload = centre ? sim.tx_payload : make_payload(cfg, k);
    channels.emplace_back(transmit(cfg, payload, k), cfg.channel_offset(k));
  }
  const auto launched = wdm_mux(channels);
  channels.clear();

  LinkPlan plan = cfg.link;
  plan.launch_power_dbm = cfg.link.launch_power_dbm + 10.0 * std::log10(static_cast<double>(cfg.wdm.n_channels));
  Rng ase(derive_seed(cfg.seeds.noise, kAseStream));
  const auto optical =
      propagate_link(launched, plan, cfg.fiber, cfg.impairments.nonlinearity, cfg.impairments.ase_noise, ase);
  sim.received = receive(cfg, optical);
  return sim;
}

LinkSimulation replay_link(const ScenarioConfig& cfg, SampledWaveform received) {
  cfg.validate();
  if (received.sample_rate != cfg.simulation_rate()) {
    throw ConfigError("oversampling", "trace sample rate " + std::to_string(received.sample_rate) +
                                          " Hz does not match the configured simulation rate");
  }
  const std::size_t expected =
      (cfg.n_payload_symbols + cfg.modem.n_preamble_symbols) * cfg.modem.symbol_length() * cfg.oversampling;
  if (received.size() != expected) {
    throw ConfigError("n_payload_symbols", "trace holds " + std::to_string(received.size()) + " samples, configuration implies " +
                                               std::to_string(expected));
  }
  LinkSimulation sim;
  sim.config = cfg;
  sim.tx_payload = make_payload(cfg, cfg.measured_channel());
  sim.received = std::move(received);
  return sim;
}

double net_bit_rate(const ScenarioConfig& cfg) {
  const auto& c = Constellation::get(cfg.modulation);
  const double symbol_rate = cfg.modem.sample_rate / static_cast<double>(cfg.modem.symbol_length());
  const double frames = static_cast<double>(cfg.n_payload_symbols + cfg.modem.n_preamble_symbols);
  const double counted = static_cast<double>(cfg.n_payload_symbols - cfg.n_training_symbols());
  return symbol_rate * static_cast<double>(cfg.modem.n_data_subcarriers * c.bits_per_symbol()) * counted / frames;
}

std::string link_key(const ScenarioConfig& cfg) {
  ScenarioConfig c = cfg;
  c.equalizer = EqualizerSpec{};
  c.training = TrainingConfig{};
  c.seeds.training = 0;
  return canonical_json(c);
}

RunResult evaluate_equalizer(const LinkSimulation& sim, const EqualizerSpec& eq) {
  ScenarioConfig cfg = sim.config;
  cfg.equalizer = eq;
  return evaluate_receiver(sim, cfg);
}

RunResult evaluate_receiver(const LinkSimulation& sim, const ScenarioConfig& receiver) {
  const auto start = std::chrono::steady_clock::now();
  if (link_key(receiver) != link_key(sim.config)) {
    throw std::invalid_argument("evaluate_receiver: configuration describes a different link");
  }
  ScenarioConfig cfg = receiver;
  const auto& eq = cfg.equalizer;
  cfg.training.seed = cfg.seeds.training;
  cfg.validate();
  const auto& constellation = Constellation::get(cfg.modulation);

  SampledWaveform field;
  if (eq.kind == EqualizerKind::Dbp) {
    FiberParams p = cfg.fiber;
    if (!cfg.impairments.nonlinearity) p.gamma = 0.0;
    LinkPlan plan = cfg.link;
    field = dbp_equalize(sim.received, p, plan, eq.dbp_steps_per_span);
  } else {
    field = cd_compensate(sim.received, cfg.fiber, static_cast<double>(cfg.link.n_spans) * cfg.link.span_length_km);
  }
  field = downsample(field, cfg.oversampling);
  const auto rx_frame = split_grid(ofdm_demodulate(field, cfg.modem), cfg.modem);
  const auto estimate = estimate_channel(rx_frame, cfg.modem);
  const auto linear = linear_equalize(rx_frame.payload, estimate);

  const std::size_t n_train = cfg.n_training_symbols();
  const std::size_t n_eval = cfg.n_payload_symbols - n_train;
  RunResult result;
  result.equalizer = eq.label();
  result.reference = sim.tx_payload.slice_rows(n_train, n_eval);
  const auto eval_rows = linear.slice_rows(n_train, n_eval);

  switch (eq.kind) {
    case EqualizerKind::Linear:
    case EqualizerKind::Dbp:
      result.equalized = eval_rows;
      break;
    case EqualizerKind::Ann: {
      auto trained = ann_per_subcarrier_train(sim.tx_payload.slice_rows(0, n_train), linear.slice_rows(0, n_train),
                                              constellation.order(), cfg.training);
      result.equalized = ann_per_subcarrier_equalize(trained.network, eval_rows);
      result.training = std::move(trained.record);
      break;
    }
    case EqualizerKind::MimoDl: {
      auto net = build_network(GroupPlan::for_case(eq.group_case, cfg.modem.n_data_subcarriers), constellation.order(),
                               cfg.training.seed);
      auto trained = train_rprop(std::move(net), sim.tx_payload.slice_rows(0, n_train), linear.slice_rows(0, n_train),
                                 cfg.training);
      result.equalized = equalize_grouped(trained.network, eval_rows);
      result.training = std::move(trained.record);
      break;
    }
  }
  result.quality = assess(result.reference, result.equalized, constellation);
  result.fingerprint = fingerprint(cfg);
  result.version = std::string(kVersion);
  result.net_bit_rate = net_bit_rate(cfg);
  result.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

RunResult run_scenario(const ScenarioConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  auto result = evaluate_equalizer(simulate_link(cfg), cfg.equalizer);
  result.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace cooflab
