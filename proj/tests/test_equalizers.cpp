#include <cmath>

#include "cooflab/equalizers.hpp"
#include "cooflab/random.hpp"
#include "cooflab/scenario.hpp"
#include "doctest.h"

using namespace cooflab;

namespace {

ScenarioConfig small_link() {
  auto cfg = ScenarioConfig::defaults();
  cfg.wdm.n_channels = 1;
  cfg.oversampling = 2;
  cfg.link.n_spans = 2;
  cfg.link.step_km = 1.0;
  cfg.n_payload_symbols = 20;
  return cfg;
}

ScenarioConfig noiseless(ScenarioConfig cfg) {
  cfg.impairments.ase_noise = false;
  cfg.impairments.converters = false;
  cfg.impairments.phase_noise = false;
  return cfg;
}

EqualizerSpec spec(EqualizerKind kind, std::size_t dbp_steps = 40) {
  EqualizerSpec e;
  e.kind = kind;
  e.dbp_steps_per_span = dbp_steps;
  return e;
}

}  // namespace

TEST_CASE("one-tap equalizer inverts a known channel") {
  SymbolGrid rx(3, 4);
  Rng rng(1);
  for (auto& z : rx.values()) z = rng.complex_normal(1.0);
  ChannelEstimate est{std::vector<Complex>(4, 1.0), {}, std::vector<double>(3, 0.0)};
  CHECK(linear_equalize(rx, est) == rx);

  const Complex g = std::polar(2.5, -0.7);
  SymbolGrid distorted = rx;
  for (auto& z : distorted.values()) z *= g;
  est.taps.assign(4, g);
  const auto out = linear_equalize(distorted, est);
  for (std::size_t i = 0; i < out.values().size(); ++i) CHECK(std::abs(out.values()[i] - rx.values()[i]) < 1e-14);

  est.taps[2] = 0.0;
  CHECK_THROWS_AS(linear_equalize(rx, est), std::invalid_argument);
}

TEST_CASE("linear noiseless 32-span link is error free") {
  auto cfg = noiseless(small_link());
  cfg.impairments.nonlinearity = false;
  cfg.link.n_spans = 32;
  cfg.equalizer = spec(EqualizerKind::Linear);
  for (auto m : {Modulation::QPSK, Modulation::QAM16}) {
    cfg.modulation = m;
    const auto r = run_scenario(cfg);
    CHECK(r.quality.ber == 0.0);
    CHECK(r.quality.error_free);
  }
}

TEST_CASE("back-propagation without nonlinearity is dispersion compensation") {
  auto cfg = noiseless(small_link());
  cfg.impairments.nonlinearity = false;
  const auto sim = simulate_link(cfg);
  FiberParams linear = cfg.fiber;
  linear.gamma = 0.0;
  const auto dbp = dbp_equalize(sim.received, linear, cfg.link, 40);
  const auto cd = cd_compensate(sim.received, cfg.fiber, 200.0);
  CHECK(relative_error(dbp.samples, cd.samples) < 1e-9);
  CHECK_THROWS_AS(dbp_equalize(sim.received, linear, cfg.link, 0), std::invalid_argument);
}

TEST_CASE("matched back-propagation inverts a noiseless nonlinear link") {
  auto cfg = noiseless(small_link());
  cfg.link.launch_power_dbm = 8.0;
  cfg.modulation = Modulation::QAM16;
  const auto sim = simulate_link(cfg);

  const auto linear = evaluate_equalizer(sim, spec(EqualizerKind::Linear));
  CHECK(linear.quality.ber > 0.0);
  const auto matched = evaluate_equalizer(sim, spec(EqualizerKind::Dbp, 100));
  CHECK(matched.quality.ber == 0.0);
}

TEST_CASE("back-propagation beats linear equalization at high power") {
  auto cfg = small_link();
  cfg.modulation = Modulation::QAM16;
  cfg.link.n_spans = 4;
  cfg.link.launch_power_dbm = 7.0;
  cfg.n_payload_symbols = 40;
  const auto sim = simulate_link(cfg);
  const auto linear = evaluate_equalizer(sim, spec(EqualizerKind::Linear));
  const auto dbp = evaluate_equalizer(sim, spec(EqualizerKind::Dbp));
  CHECK(linear.quality.ber > 0.0);
  CHECK(dbp.quality.q_factor_db >= linear.quality.q_factor_db);
}

TEST_CASE("training rows are excluded from the counted bits") {
  auto cfg = noiseless(small_link());
  cfg.link.n_spans = 0;
  cfg.n_payload_symbols = 30;
  cfg.training.overhead_fraction = 0.2;
  cfg.training.max_epochs = 3;
  const auto sim = simulate_link(cfg);
  for (auto kind : {EqualizerKind::Linear, EqualizerKind::Ann, EqualizerKind::MimoDl}) {
    const auto r = evaluate_equalizer(sim, spec(kind));
    CHECK(cfg.n_training_symbols() == 6);
    CHECK(r.quality.n_bits_counted == 24 * 210 * 2);
    CHECK(r.reference.rows() == 24);
    CHECK(r.reference == sim.tx_payload.slice_rows(6, 24));
    CHECK(r.training.has_value() == (kind != EqualizerKind::Linear));
  }
}
