#include "cooflab/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "cooflab/text.hpp"

namespace cooflab {

using nlohmann::json;

std::string_view to_string(EqualizerKind k) {
  switch (k) {
    case EqualizerKind::Linear: return "linear";
    case EqualizerKind::Dbp: return "dbp";
    case EqualizerKind::Ann: return "ann";
    case EqualizerKind::MimoDl: return "mimo_dl";
  }
  return "unknown";
}

EqualizerKind equalizer_from_string(std::string_view s) {
  for (auto k : {EqualizerKind::Linear, EqualizerKind::Dbp, EqualizerKind::Ann, EqualizerKind::MimoDl}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError("equalizer.type", "unknown equalizer '" + std::string(s) + "' (linear, dbp, ann, mimo_dl)");
}

std::string EqualizerSpec::label() const {
  switch (kind) {
    case EqualizerKind::Dbp: return "dbp" + std::to_string(dbp_steps_per_span);
    case EqualizerKind::MimoDl: return "mimo_dl_" + std::string(to_string(group_case));
    default: return std::string(to_string(kind));
  }
}

double ScenarioConfig::channel_offset(std::size_t k) const {
  return (static_cast<double>(k) - static_cast<double>(wdm.n_channels - 1) / 2.0) * wdm.spacing_hz;
}

std::size_t ScenarioConfig::n_training_symbols() const {
  const auto n = static_cast<std::size_t>(std::llround(training.overhead_fraction * static_cast<double>(n_payload_symbols)));
  return std::max<std::size_t>(n, 1);
}

void ScenarioConfig::validate() const {
  modem.validate();
  fiber.validate();
  link.validate();
  training.validate();
  if (oversampling < 2) throw ConfigError("oversampling", "must be >= 2 for nonlinear propagation");
  if (n_payload_symbols < 2) throw ConfigError("n_payload_symbols", "must be >= 2");
  if (n_training_symbols() >= n_payload_symbols) {
    throw ConfigError("training.overhead_fraction", "leaves no payload symbols for BER counting");
  }
  if (wdm.n_channels == 0) throw ConfigError("wdm.n_channels", "must be >= 1");
  const double bw = modem.occupied_bandwidth();
  if (wdm.n_channels > 1) {
    if (!(wdm.spacing_hz >= bw)) {
      throw ConfigError("wdm.spacing_hz", "channel spacing " + format_double(wdm.spacing_hz) +
                                              " Hz is below the occupied bandwidth " + format_double(bw) + " Hz");
    }
  }
  const double extent = static_cast<double>(wdm.n_channels - 1) * wdm.spacing_hz + bw;
  if (extent > simulation_rate() / 2.0) {
    throw ConfigError("oversampling", "simulation rate " + format_double(simulation_rate()) +
                                          " Hz does not leave 2x headroom over the occupied band " +
                                          format_double(extent) + " Hz (Nyquist)");
  }
  if (impairments.converters) {
    if (impairments.converter.bits < 1 || impairments.converter.bits > 52) {
      throw ConfigError("impairments.converter.bits", "must be in [1, 52]");
    }
    if (!std::isfinite(impairments.converter.clipping_ratio_db)) {
      throw ConfigError("impairments.converter.clipping_ratio_db", "must be finite");
    }
  }
  if (impairments.phase_noise && !(impairments.linewidth_hz >= 0.0)) {
    throw ConfigError("impairments.linewidth_hz", "must be >= 0");
  }
  if (equalizer.kind == EqualizerKind::Dbp && equalizer.dbp_steps_per_span < 1) {
    throw ConfigError("equalizer.dbp_steps_per_span", "must be >= 1");
  }
  if (equalizer.kind == EqualizerKind::MimoDl) {
    if (equalizer.group_case == GroupCase::PerSubcarrier || equalizer.group_case == GroupCase::Custom) {
      throw ConfigError("equalizer.case", "must be 1, 2, 3 or 4");
    }
    GroupPlan::for_case(equalizer.group_case, modem.n_data_subcarriers).validate(modem.n_data_subcarriers);
  }
}

ScenarioConfig ScenarioConfig::defaults() {
  ScenarioConfig c;
  c.link.n_spans = 32;
  c.link.launch_power_dbm = -5.0;
  c.oversampling = 6;
  return c;
}

ScenarioConfig ScenarioConfig::full_scale() {
  ScenarioConfig c = defaults();
  c.wdm.n_channels = 20;
  c.oversampling = 20;
  return c;
}

// ---------------------------------------------------------------- JSON

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

GroupCase case_from_int(long long v) {
  if (v < 1 || v > 4) throw ConfigError("equalizer.case", "must be 1, 2, 3 or 4");
  return static_cast<GroupCase>(v);
}

// Reads known keys from an object and rejects anything else.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }
  ~Reader() = default;

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  template <typename T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(field(key), std::string("wrong type: ") + e.what());
    }
  }
  void get(const std::string& key, std::size_t& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError(field(key), "expected a non-negative integer");
    out = v.get<std::size_t>();
  }
  void get(const std::string& key, std::uint64_t& out, int) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_number_unsigned()) throw ConfigError(field(key), "expected a non-negative integer");
    out = v.get<std::uint64_t>();
  }
  void get(const std::string& key, double& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(field(key), "expected a number");
    out = v.get<double>();
  }
  void get(const std::string& key, std::optional<double>& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    const auto& v = j_.at(key);
    if (v.is_null()) {
      out.reset();
    } else if (v.is_number()) {
      out = v.get<double>();
    } else {
      throw ConfigError(field(key), "expected a number or null");
    }
  }
  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }
  const json& at(const std::string& key) const { return j_.at(key); }
  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) throw ConfigError(field(k), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace

json to_json(const ScenarioConfig& c) {
  json j;
  j["modem"] = {{"ifft_size", c.modem.ifft_size},
                {"n_data_subcarriers", c.modem.n_data_subcarriers},
                {"n_pilot_subcarriers", c.modem.n_pilot_subcarriers},
                {"cp_fraction", c.modem.cp_fraction},
                {"sample_rate", c.modem.sample_rate},
                {"n_preamble_symbols", c.modem.n_preamble_symbols}};
  j["modulation"] = std::string(to_string(c.modulation));
  j["oversampling"] = c.oversampling;
  j["fiber"] = {{"gamma", c.fiber.gamma},
                {"dispersion_D", c.fiber.dispersion_D},
                {"dispersion_slope_S", c.fiber.dispersion_slope_S},
                {"loss_alpha", c.fiber.loss_alpha},
                {"pmd_coeff", c.fiber.pmd_coeff},
                {"center_wavelength", c.fiber.center_wavelength}};
  j["link"] = {{"n_spans", c.link.n_spans},
               {"span_length_km", c.link.span_length_km},
               {"launch_power_dbm", c.link.launch_power_dbm},
               {"step_km", c.link.step_km},
               {"amplifier",
                {{"gain_db", optional_number(c.link.amplifier.gain_db)},
                 {"noise_figure_db", c.link.amplifier.noise_figure_db},
                 {"optical_freq", optional_number(c.link.amplifier.optical_freq)}}}};
  j["wdm"] = {{"n_channels", c.wdm.n_channels}, {"spacing_hz", c.wdm.spacing_hz}};
  j["impairments"] = {{"nonlinearity", c.impairments.nonlinearity},
                      {"ase_noise", c.impairments.ase_noise},
                      {"converters", c.impairments.converters},
                      {"phase_noise", c.impairments.phase_noise},
                      {"linewidth_hz", c.impairments.linewidth_hz},
                      {"converter",
                       {{"bits", c.impairments.converter.bits},
                        {"clipping_ratio_db", c.impairments.converter.clipping_ratio_db}}}};
  j["equalizer"] = {{"type", std::string(to_string(c.equalizer.kind))},
                    {"case", static_cast<int>(c.equalizer.group_case)},
                    {"dbp_steps_per_span", c.equalizer.dbp_steps_per_span}};
  const auto& t = c.training;
  j["training"] = {{"overhead_fraction", t.overhead_fraction},
                   {"stop_threshold", t.stop_threshold},
                   {"plateau_window", t.plateau_window},
                   {"plateau_tolerance", t.plateau_tolerance},
                   {"max_epochs", t.max_epochs},
                   {"learning_rate", t.learning_rate},
                   {"rprop",
                    {{"delta0", t.rprop.delta0},
                     {"eta_plus", t.rprop.eta_plus},
                     {"eta_minus", t.rprop.eta_minus},
                     {"delta_min", t.rprop.delta_min},
                     {"delta_max", t.rprop.delta_max}}}};
  j["seeds"] = {{"channel", c.seeds.channel}, {"noise", c.seeds.noise}, {"training", c.seeds.training}};
  j["n_payload_symbols"] = c.n_payload_symbols;
  return j;
}

ScenarioConfig config_from_json(const json& j, const ScenarioConfig& base) {
  ScenarioConfig c = base;
  Reader root(j, "");
  if (root.has("modem")) {
    Reader r(root.at("modem"), "modem");
    r.get("ifft_size", c.modem.ifft_size);
    r.get("n_data_subcarriers", c.modem.n_data_subcarriers);
    r.get("n_pilot_subcarriers", c.modem.n_pilot_subcarriers);
    r.get("cp_fraction", c.modem.cp_fraction);
    r.get("sample_rate", c.modem.sample_rate);
    r.get("n_preamble_symbols", c.modem.n_preamble_symbols);
    r.finish();
  }
  if (root.has("modulation")) {
    std::string m;
    root.get("modulation", m);
    try {
      c.modulation = modulation_from_string(m);
    } catch (const std::exception& e) {
      throw ConfigError("modulation", e.what());
    }
  }
  root.get("oversampling", c.oversampling);
  if (root.has("fiber")) {
    Reader r(root.at("fiber"), "fiber");
    r.get("gamma", c.fiber.gamma);
    r.get("dispersion_D", c.fiber.dispersion_D);
    r.get("dispersion_slope_S", c.fiber.dispersion_slope_S);
    r.get("loss_alpha", c.fiber.loss_alpha);
    r.get("pmd_coeff", c.fiber.pmd_coeff);
    r.get("center_wavelength", c.fiber.center_wavelength);
    r.finish();
  }
  if (root.has("link")) {
    Reader r(root.at("link"), "link");
    r.get("n_spans", c.link.n_spans);
    r.get("span_length_km", c.link.span_length_km);
    r.get("launch_power_dbm", c.link.launch_power_dbm);
    r.get("step_km", c.link.step_km);
    if (r.has("amplifier")) {
      Reader a(r.at("amplifier"), "link.amplifier");
      a.get("gain_db", c.link.amplifier.gain_db);
      a.get("noise_figure_db", c.link.amplifier.noise_figure_db);
      a.get("optical_freq", c.link.amplifier.optical_freq);
      a.finish();
    }
    r.finish();
  }
  if (root.has("wdm")) {
    Reader r(root.at("wdm"), "wdm");
    r.get("n_channels", c.wdm.n_channels);
    r.get("spacing_hz", c.wdm.spacing_hz);
    r.finish();
  }
  if (root.has("impairments")) {
    Reader r(root.at("impairments"), "impairments");
    r.get("nonlinearity", c.impairments.nonlinearity);
    r.get("ase_noise", c.impairments.ase_noise);
    r.get("converters", c.impairments.converters);
    r.get("phase_noise", c.impairments.phase_noise);
    r.get("linewidth_hz", c.impairments.linewidth_hz);
    if (r.has("converter")) {
      Reader a(r.at("converter"), "impairments.converter");
      std::size_t bits = c.impairments.converter.bits;
      a.get("bits", bits);
      c.impairments.converter.bits = static_cast<unsigned>(bits);
      a.get("clipping_ratio_db", c.impairments.converter.clipping_ratio_db);
      a.finish();
    }
    r.finish();
  }
  if (root.has("equalizer")) {
    Reader r(root.at("equalizer"), "equalizer");
    if (r.has("type")) {
      std::string t;
      r.get("type", t);
      c.equalizer.kind = equalizer_from_string(t);
    }
    if (r.has("case")) {
      std::size_t k = 0;
      r.get("case", k);
      c.equalizer.group_case = case_from_int(static_cast<long long>(k));
    }
    r.get("dbp_steps_per_span", c.equalizer.dbp_steps_per_span);
    r.finish();
  }
  if (root.has("training")) {
    Reader r(root.at("training"), "training");
    auto& t = c.training;
    r.get("overhead_fraction", t.overhead_fraction);
    r.get("stop_threshold", t.stop_threshold);
    r.get("plateau_window", t.plateau_window);
    r.get("plateau_tolerance", t.plateau_tolerance);
    r.get("max_epochs", t.max_epochs);
    r.get("learning_rate", t.learning_rate);
    if (r.has("rprop")) {
      Reader a(r.at("rprop"), "training.rprop");
      a.get("delta0", t.rprop.delta0);
      a.get("eta_plus", t.rprop.eta_plus);
      a.get("eta_minus", t.rprop.eta_minus);
      a.get("delta_min", t.rprop.delta_min);
      a.get("delta_max", t.rprop.delta_max);
      a.finish();
    }
    r.finish();
  }
  if (root.has("seeds")) {
    Reader r(root.at("seeds"), "seeds");
    r.get("channel", c.seeds.channel, 0);
    r.get("noise", c.seeds.noise, 0);
    r.get("training", c.seeds.training, 0);
    r.finish();
  }
  root.get("n_payload_symbols", c.n_payload_symbols);
  root.finish();
  c.training.seed = c.seeds.training;
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError("config '" + path.string() + "': " + e.what());
  }
  return config_from_json(j);
}

void save_config(const ScenarioConfig& cfg, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write config '" + path.string() + "'");
  out << to_json(cfg).dump(2) << '\n';
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::string canonical_json(const ScenarioConfig& cfg) { return to_json(cfg).dump(); }

std::string fingerprint(const ScenarioConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : canonical_json(cfg)) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace cooflab
