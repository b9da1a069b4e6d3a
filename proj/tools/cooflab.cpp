// Command-line front end: run, sweep, plot, validate, print-defaults.

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cooflab/config.hpp"
#include "cooflab/report.hpp"
#include "cooflab/scenario.hpp"
#include "cooflab/sweep.hpp"
#include "cooflab/text.hpp"
#include "cooflab/trace.hpp"

namespace {

using namespace cooflab;

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kConfig = 3,
  kIo = 4,
  kFormat = 5,
  kTraining = 6,
  kInternal = 7,
};

int fail(const char* category, int code, const std::string& message) {
  std::cerr << "error[" << category << "]: " << message << '\n';
  return code;
}

void warn_full() {
  std::cerr << "warning: --full selects the 20-channel, 32-span configuration; a single run can take hours\n";
}

ScenarioConfig load_scenario(const std::string& path, bool full) {
  if (full) warn_full();
  const auto base = full ? ScenarioConfig::full_scale() : ScenarioConfig::defaults();
  if (path.empty()) return base;
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("config '" + path + "': " + e.what());
  }
  return config_from_json(j, base);
}

std::vector<double> parse_values(const std::string& list) {
  std::vector<double> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(parse_double(item));
    } catch (const FormatError&) {
      throw ConfigError("sweep.values", "not a number: '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("sweep.values", "no values given");
  return out;
}

EqualizerSpec parse_equalizer(const std::string& name, const ScenarioConfig& cfg) {
  EqualizerSpec eq = cfg.equalizer;
  // accepted forms: linear, dbp, dbpN, ann, mimo_dl, mimo_dl_caseN
  if (name.rfind("mimo_dl_case", 0) == 0) {
    eq.kind = EqualizerKind::MimoDl;
    const auto digit = name.substr(12);
    if (digit.size() != 1 || digit[0] < '1' || digit[0] > '4') {
      throw ConfigError("equalizer.case", "unknown equalizer '" + name + "'");
    }
    eq.group_case = static_cast<GroupCase>(digit[0] - '0');
  } else if (name.rfind("dbp", 0) == 0 && name.size() > 3) {
    eq.kind = EqualizerKind::Dbp;
    const auto steps = name.substr(3);
    if (!std::all_of(steps.begin(), steps.end(), ::isdigit)) throw ConfigError("equalizer.type", "unknown equalizer '" + name + "'");
    eq.dbp_steps_per_span = std::stoul(steps);
  } else {
    eq.kind = equalizer_from_string(name);
  }
  return eq;
}

std::vector<EqualizerSpec> parse_equalizers(const std::string& list, const ScenarioConfig& cfg) {
  std::vector<EqualizerSpec> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_equalizer(item, cfg));
  return out;
}

void print_summary(const std::vector<ResultRow>& rows) {
  for (const auto& s : summarize(rows)) {
    std::cerr << "  " << format_double(s.axis_value) << "  " << s.equalizer << "  mean Q " << s.mean_q_db << " dB (min "
              << s.min_q_db << ", max " << s.max_q_db << ", n=" << s.n << ")\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coherent optical OFDM nonlinear-equalization laboratory"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  std::string config_path;
  bool full = false;

  auto* defaults_cmd = app.add_subcommand("print-defaults", "Print the default scenario configuration as JSON");
  std::string defaults_out;
  defaults_cmd->add_flag("--full", full, "Print the full-scale (20-channel, 32-span) configuration");
  defaults_cmd->add_option("--output", defaults_out, "Write to this file instead of stdout");

  auto* validate_cmd = app.add_subcommand("validate", "Validate a scenario configuration");
  validate_cmd->add_option("--config", config_path, "Scenario JSON")->required();
  validate_cmd->add_flag("--full", full, "Start from the full-scale configuration");

  auto* run_cmd = app.add_subcommand("run", "Run one scenario");
  std::string run_out, symbols_out, trace_out, trace_in, network_out, run_equalizer;
  run_cmd->add_option("--config", config_path, "Scenario JSON (defaults when omitted)");
  run_cmd->add_flag("--full", full, "Start from the full-scale configuration");
  run_cmd->add_option("--output", run_out, "Results CSV")->required();
  run_cmd->add_option("--equalizer", run_equalizer, "Override: linear, dbp[N], ann, mimo_dl, mimo_dl_caseN");
  run_cmd->add_option("--symbols-out", symbols_out, "Write equalized symbols (re,im CSV)");
  run_cmd->add_option("--trace-out", trace_out, "Save the received waveform trace");
  run_cmd->add_option("--trace-in", trace_in, "Replay a saved received waveform instead of simulating the link");

  auto* sweep_cmd = app.add_subcommand("sweep", "Sweep one parameter");
  std::string sweep_out, axis_name, values_list, equalizer_list;
  std::size_t repeats = 3;
  std::size_t workers = 0;
  sweep_cmd->add_option("--config", config_path, "Scenario JSON (defaults when omitted)");
  sweep_cmd->add_flag("--full", full, "Start from the full-scale configuration");
  sweep_cmd->add_option("--axis", axis_name, "launch_power_dbm, overhead or case")->required();
  sweep_cmd->add_option("--values", values_list, "Comma-separated axis values")->required();
  sweep_cmd->add_option("--repeats", repeats, "Repeats per point with fresh noise and training seeds");
  sweep_cmd->add_option("--equalizers", equalizer_list, "Comma-separated equalizers evaluated at every point");
  sweep_cmd->add_option("--workers", workers, std::string("Worker threads (0: all cores; ") + kWorkersEnv + " overrides)");
  sweep_cmd->add_option("--output", sweep_out, "Results CSV")->required();

  auto* plot_cmd = app.add_subcommand("plot", "Render an SVG from a results or symbols CSV");
  std::string plot_in, plot_out, plot_kind;
  plot_cmd->add_option("--input", plot_in, "Results CSV, or symbols CSV for constellation plots")->required();
  plot_cmd->add_option("--kind", plot_kind, "q_vs_lop, q_per_subcarrier, q_vs_overhead or constellation")->required();
  plot_cmd->add_option("--output", plot_out, "SVG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", kUsage, e.what());
  }

  try {
    if (defaults_cmd->parsed()) {
      if (full) warn_full();
      const auto cfg = full ? ScenarioConfig::full_scale() : ScenarioConfig::defaults();
      if (defaults_out.empty()) {
        std::cout << to_json(cfg).dump(2) << '\n';
      } else {
        save_config(cfg, defaults_out);
      }
      return kOk;
    }

    if (validate_cmd->parsed()) {
      const auto cfg = load_scenario(config_path, full);
      cfg.validate();
      std::cout << "ok " << fingerprint(cfg) << '\n';
      return kOk;
    }

    if (run_cmd->parsed()) {
      auto cfg = load_scenario(config_path, full);
      if (!run_equalizer.empty()) cfg.equalizer = parse_equalizer(run_equalizer, cfg);
      cfg.training.seed = cfg.seeds.training;
      cfg.validate();
      const auto sim = trace_in.empty() ? simulate_link(cfg) : replay_link(cfg, load_trace(trace_in));
      if (!trace_out.empty()) save_trace(sim.received, trace_out);
      const auto result = evaluate_equalizer(sim, cfg.equalizer);
      emit_csv({make_row(cfg, result)}, run_out);
      if (!symbols_out.empty()) emit_symbols(result.equalized, symbols_out);
      std::cerr << result.equalizer << ": Q " << result.quality.q_factor_db << " dB, BER " << result.quality.ber << " ("
                << result.quality.n_errors << "/" << result.quality.n_bits_counted << "), net rate "
                << result.net_bit_rate / 1e9 << " Gbit/s, " << result.wall_time_s << " s\n";
      return kOk;
    }

    if (sweep_cmd->parsed()) {
      const auto cfg = load_scenario(config_path, full);
      SweepSpec spec;
      spec.axis = sweep_axis_from_string(axis_name);
      spec.values = parse_values(values_list);
      spec.repeats = repeats;
      spec.workers = workers;
      if (!equalizer_list.empty()) spec.equalizers = parse_equalizers(equalizer_list, cfg);
      const auto rows = run_sweep(cfg, spec, [](const ResultRow& r) {
        std::cerr << "  point " << r.point << " repeat " << r.repeat << " " << r.equalizer << ": Q "
                  << r.quality.q_factor_db << " dB\n";
      });
      emit_csv(rows, sweep_out);
      print_summary(rows);
      return kOk;
    }

    if (plot_cmd->parsed()) {
      const auto kind = plot_kind_from_string(plot_kind);
      if (kind == PlotKind::Constellation) {
        emit_constellation(read_symbols(plot_in), plot_out);
      } else {
        emit_plot(read_csv(plot_in), kind, plot_out);
      }
      return kOk;
    }
  } catch (const ConfigError& e) {
    return fail("config", kConfig, e.what());
  } catch (const IoError& e) {
    return fail("io", kIo, e.what());
  } catch (const FormatError& e) {
    return fail("format", kFormat, e.what());
  } catch (const TrainingDiverged& e) {
    return fail("training", kTraining, e.what());
  } catch (const std::invalid_argument& e) {
    return fail("input", kUsage, e.what());
  } catch (const std::exception& e) {
    return fail("internal", kInternal, e.what());
  }
  return kOk;
}
