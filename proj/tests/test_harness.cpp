#include <cstdlib>
#include <filesystem>

#include "cooflab/config.hpp"
#include "cooflab/report.hpp"
#include "cooflab/scenario.hpp"
#include "cooflab/sweep.hpp"
#include "cooflab/trace.hpp"
#include "doctest.h"

using namespace cooflab;
namespace fs = std::filesystem;

namespace {

ScenarioConfig tiny() {
  auto cfg = ScenarioConfig::defaults();
  cfg.wdm.n_channels = 1;
  cfg.oversampling = 2;
  cfg.link.n_spans = 1;
  cfg.link.step_km = 5.0;
  cfg.n_payload_symbols = 12;
  cfg.training.max_epochs = 4;
  cfg.equalizer.kind = EqualizerKind::Linear;
  return cfg;
}

fs::path scratch(const std::string& name) { return fs::temp_directory_path() / ("cooflab_test_" + name); }

std::size_t count_of(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("defaults are valid and carry the transceiver parameters") {
  const auto cfg = ScenarioConfig::defaults();
  cfg.validate();
  CHECK(cfg.modem.ifft_size == 512);
  CHECK(cfg.modem.n_data_subcarriers == 210);
  CHECK(cfg.modem.cp_samples() == 10);
  CHECK(cfg.fiber.gamma == 1.1);
  CHECK(cfg.link.amplifier.noise_figure_db == 5.5);
  CHECK(cfg.impairments.converter.bits == 10);
  CHECK(cfg.impairments.converter.clipping_ratio_db == 13.0);
  CHECK(cfg.training.overhead_fraction == 0.10);
  CHECK(cfg.n_payload_symbols * 210 * 2 >= 100000);
  ScenarioConfig::full_scale().validate();
  CHECK(ScenarioConfig::full_scale().wdm.n_channels == 20);
  CHECK(ScenarioConfig::full_scale().link.n_spans == 32);
}

TEST_CASE("config json round trip keeps the fingerprint") {
  auto cfg = tiny();
  cfg.modulation = Modulation::QAM16;
  cfg.equalizer.kind = EqualizerKind::MimoDl;
  cfg.equalizer.group_case = GroupCase::Case3;
  cfg.seeds.noise = 12345678901234ULL;
  const auto back = config_from_json(to_json(cfg));
  CHECK(canonical_json(back) == canonical_json(cfg));
  CHECK(fingerprint(back) == fingerprint(cfg));
  CHECK(fingerprint(cfg).size() == 16);
  auto other = cfg;
  other.link.launch_power_dbm += 1.0;
  CHECK(fingerprint(other) != fingerprint(cfg));

  const auto path = scratch("config.json");
  save_config(cfg, path);
  CHECK(fingerprint(load_config(path)) == fingerprint(cfg));
  fs::remove(path);
}

TEST_CASE("config parsing names the offending field") {
  auto j = to_json(tiny());
  j["link"]["stepkm"] = 1.0;
  CHECK_THROWS_WITH_AS(config_from_json(j), doctest::Contains("link.stepkm"), ConfigError);
  j = to_json(tiny());
  j["link"]["step_km"] = "fine";
  CHECK_THROWS_WITH_AS(config_from_json(j), doctest::Contains("link.step_km"), ConfigError);
  j = to_json(tiny());
  j["modulation"] = "qam64";
  CHECK_THROWS_AS(config_from_json(j), ConfigError);
  CHECK_THROWS_AS(load_config(scratch("missing.json")), IoError);
}

TEST_CASE("validation rejects inconsistent settings") {
  auto expect_field = [](ScenarioConfig cfg, const std::string& field) {
    try {
      cfg.validate();
      FAIL("accepted an invalid config for " << field);
    } catch (const ConfigError& e) {
      CHECK(e.field() == field);
    }
  };
  auto cfg = tiny();
  cfg.training.overhead_fraction = 0.0;
  expect_field(cfg, "training.overhead_fraction");
  cfg = tiny();
  cfg.training.overhead_fraction = 1.0;
  expect_field(cfg, "training.overhead_fraction");
  cfg = tiny();
  cfg.equalizer.kind = EqualizerKind::Dbp;
  cfg.equalizer.dbp_steps_per_span = 0;
  expect_field(cfg, "equalizer.dbp_steps_per_span");
  cfg = tiny();
  cfg.wdm.n_channels = 5;
  cfg.oversampling = 2;
  expect_field(cfg, "oversampling");
  cfg = tiny();
  cfg.wdm.n_channels = 3;
  cfg.wdm.spacing_hz = 5e9;
  cfg.oversampling = 8;
  expect_field(cfg, "wdm.spacing_hz");
  cfg = tiny();
  cfg.equalizer.kind = EqualizerKind::MimoDl;
  cfg.equalizer.group_case = GroupCase::PerSubcarrier;
  expect_field(cfg, "equalizer.case");
  cfg = tiny();
  cfg.modem.n_data_subcarriers = 100;
  cfg.equalizer.kind = EqualizerKind::MimoDl;
  cfg.equalizer.group_case = GroupCase::Case3;
  expect_field(cfg, "equalizer.case");
  cfg = tiny();
  cfg.link.step_km = -1.0;
  expect_field(cfg, "link.step_km");
  cfg = tiny();
  cfg.training.rprop.eta_plus = 0.9;
  expect_field(cfg, "training.rprop");
}

TEST_CASE("back-to-back run is error free for every equalizer") {
  auto cfg = tiny();
  cfg.link.n_spans = 0;
  cfg.impairments = Impairments{false, false, false, false, 0.0, ConverterParams{}};
  for (auto kind : {EqualizerKind::Linear, EqualizerKind::Dbp}) {
    cfg.equalizer.kind = kind;
    CHECK(run_scenario(cfg).quality.ber == 0.0);
  }
}

TEST_CASE("identical seeds give byte-identical tables") {
  auto cfg = tiny();
  cfg.equalizer.kind = EqualizerKind::Ann;
  const auto a = run_scenario(cfg);
  const auto b = run_scenario(cfg);
  CHECK(format_csv({make_row(cfg, a)}) == format_csv({make_row(cfg, b)}));
  CHECK(a.equalized == b.equalized);
  auto other = cfg;
  other.seeds.noise = 99;
  CHECK(!(run_scenario(other).equalized == a.equalized));
}

TEST_CASE("trace round trip and errors") {
  const auto sim = simulate_link(tiny());
  const auto bytes = encode_trace(sim.received);
  CHECK(decode_trace(bytes) == sim.received);

  const auto path = scratch("trace.bin");
  save_trace(sim.received, path);
  CHECK(load_trace(path) == sim.received);
  fs::remove(path);

  auto bad = bytes;
  bad[1] = 'X';
  CHECK_THROWS_WITH_AS(decode_trace(bad), doctest::Contains("magic"), FormatError);
  bad = bytes;
  bad[4] = 7;
  CHECK_THROWS_WITH_AS(decode_trace(bad), doctest::Contains("version"), FormatError);
  const std::vector<std::uint8_t> cut(bytes.begin(), bytes.end() - 3);
  CHECK_THROWS_WITH_AS(decode_trace(cut), doctest::Contains("truncated"), FormatError);
  const std::vector<std::uint8_t> header_only(bytes.begin(), bytes.begin() + 10);
  CHECK_THROWS_WITH_AS(decode_trace(header_only), doctest::Contains("truncated"), FormatError);
  auto extra = bytes;
  extra.push_back(0);
  CHECK_THROWS_AS(decode_trace(extra), FormatError);
}

TEST_CASE("replayed trace reproduces the metrics") {
  auto cfg = tiny();
  cfg.equalizer.kind = EqualizerKind::MimoDl;
  const auto sim = simulate_link(cfg);
  const auto direct = evaluate_equalizer(sim, cfg.equalizer);
  const auto replay = replay_link(cfg, decode_trace(encode_trace(sim.received)));
  const auto again = evaluate_equalizer(replay, cfg.equalizer);
  CHECK(format_csv({make_row(cfg, direct)}) == format_csv({make_row(cfg, again)}));
  auto wrong = sim.received;
  wrong.samples.pop_back();
  CHECK_THROWS(replay_link(cfg, wrong));
}

TEST_CASE("results table round trip is exact") {
  auto cfg = tiny();
  cfg.equalizer.kind = EqualizerKind::Ann;
  cfg.link.launch_power_dbm = 1.0 / 3.0;
  auto row = make_row(cfg, run_scenario(cfg));
  row.axis = "launch_power_dbm";
  row.axis_value = 0.1 + 0.2;
  const std::vector<ResultRow> rows{row, row};
  const auto text = format_csv(rows);
  CHECK(text.substr(0, text.find('\n')) == results_csv_header());
  CHECK(parse_csv(text) == rows);

  const auto path = scratch("rows.csv");
  emit_csv(rows, path);
  CHECK(read_csv(path) == rows);
  fs::remove(path);

  const auto empty = scratch("empty.csv");
  fs::remove(empty);
  CHECK_THROWS(emit_csv({}, empty));
  CHECK_FALSE(fs::exists(empty));
  CHECK_THROWS_AS(parse_csv("nonsense\n1,2\n"), FormatError);
}

TEST_CASE("unwritable output path is an io error") {
  auto cfg = tiny();
  const auto row = make_row(cfg, run_scenario(cfg));
  CHECK_THROWS_AS(emit_csv({row}, "/nonexistent-dir/rows.csv"), IoError);
}

TEST_CASE("noiseless QPSK constellation shows four clusters") {
  auto cfg = tiny();
  cfg.link.n_spans = 0;
  cfg.impairments = Impairments{false, false, false, false, 0.0, ConverterParams{}};
  const auto r = run_scenario(cfg);
  const auto svg = render_constellation(r.equalized.values());
  CHECK(count_of(svg, "<circle") == 4);

  const auto path = scratch("symbols.csv");
  emit_symbols(r.equalized, path);
  CHECK(read_symbols(path) == r.equalized.values());
  fs::remove(path);
}

TEST_CASE("plots carry dB axes") {
  auto base = tiny();
  SweepSpec spec;
  spec.axis = SweepAxis::LaunchPower;
  spec.values = {-2.0, 0.0};
  spec.repeats = 1;
  spec.equalizers = {EqualizerSpec{EqualizerKind::Linear}};
  spec.workers = 1;
  const auto rows = run_sweep(base, spec);
  const auto lop = render_plot(rows, PlotKind::QVsLop);
  CHECK(lop.find("<svg") == 0);
  CHECK(lop.find("(dBm)") != std::string::npos);
  CHECK(lop.find("Q-factor (dB)") != std::string::npos);
  const auto sub = render_plot(rows, PlotKind::QPerSubcarrier);
  CHECK(sub.find("Q-factor (dB)") != std::string::npos);
  CHECK(plot_kind_from_string("q_vs_overhead") == PlotKind::QVsOverhead);
  CHECK_THROWS(plot_kind_from_string("pie"));
  CHECK_THROWS(render_plot({}, PlotKind::QVsLop));
}

TEST_CASE("sweep rows do not depend on the worker count") {
  auto base = tiny();
  SweepSpec spec;
  spec.axis = SweepAxis::LaunchPower;
  spec.values = {-3.0, 0.0, 3.0};
  spec.repeats = 2;
  spec.equalizers = {EqualizerSpec{EqualizerKind::Linear}, EqualizerSpec{EqualizerKind::Ann}};
  spec.workers = 1;
  const auto serial = run_sweep(base, spec);
  spec.workers = 4;
  const auto parallel = run_sweep(base, spec);
  CHECK(serial.size() == 12);
  CHECK(format_csv(serial) == format_csv(parallel));
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].point == i / 4);
    CHECK(serial[i].repeat == (i / 2) % 2);
  }
  CHECK(serial[0].noise_seed != serial[2].noise_seed);
  CHECK(serial[0].training_seed != serial[2].training_seed);

  const auto summary = summarize(serial);
  REQUIRE(summary.size() == 6);
  CHECK(summary[0].n == 2);
  CHECK(summary[0].min_q_db <= summary[0].mean_q_db);
  CHECK(summary[0].mean_q_db <= summary[0].max_q_db);
}

TEST_CASE("an invalid point rejects the whole sweep") {
  auto base = tiny();
  SweepSpec spec;
  spec.axis = SweepAxis::Overhead;
  spec.values = {0.1, 1.5};
  spec.repeats = 1;
  std::size_t calls = 0;
  CHECK_THROWS_AS(run_sweep(base, spec, [&](const ResultRow&) { ++calls; }), ConfigError);
  CHECK(calls == 0);
}

TEST_CASE("case axis selects the grouped equalizer per point") {
  auto base = tiny();
  SweepSpec spec;
  spec.axis = SweepAxis::Case;
  spec.values = {1.0, 4.0};
  const auto eqs = point_equalizers(base, spec, 4.0);
  REQUIRE(eqs.size() == 1);
  CHECK(eqs[0].label() == "mimo_dl_case4");
  CHECK(sweep_axis_from_string("case") == SweepAxis::Case);
  CHECK_THROWS(sweep_axis_from_string("temperature"));
}

TEST_CASE("worker count follows the environment override") {
  ::setenv(kWorkersEnv, "3", 1);
  CHECK(resolve_workers(8) == 3);
  ::setenv(kWorkersEnv, "bogus", 1);
  CHECK_THROWS_AS(resolve_workers(8), ConfigError);
  ::unsetenv(kWorkersEnv);
  CHECK(resolve_workers(5) == 5);
  CHECK(resolve_workers(0) >= 1);
}

TEST_CASE("net bit rate accounts for framing and training") {
  auto cfg = tiny();
  const double full = net_bit_rate(cfg);
  cfg.training.overhead_fraction = 0.5;
  CHECK(net_bit_rate(cfg) < full);
  CHECK(full > 0.0);
}
