#include "cooflab/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "binary_io.hpp"
#include "cooflab/text.hpp"

namespace cooflab {

ResultRow make_row(const ScenarioConfig& cfg, const RunResult& r) {
  ResultRow row;
  row.equalizer = r.equalizer;
  row.modulation = std::string(to_string(cfg.modulation));
  row.launch_power_dbm = cfg.link.launch_power_dbm;
  row.overhead_fraction = cfg.training.overhead_fraction;
  row.noise_seed = cfg.seeds.noise;
  row.training_seed = cfg.seeds.training;
  row.fingerprint = r.fingerprint;
  row.quality = r.quality;
  if (r.training) {
    row.epochs_run = r.training->epochs_run;
    row.converged = r.training->converged;
  }
  row.net_bit_rate = r.net_bit_rate;
  return row;
}

// ---------------------------------------------------------------- CSV

namespace {

constexpr std::size_t kColumns = 23;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(std::move(cur));
  return out;
}

std::uint64_t parse_unsigned(const std::string& s, const char* column) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw FormatError(std::string("results csv: column ") + column + ": not an unsigned integer: '" + s + "'");
  }
  return std::stoull(s);
}

double parse_number(const std::string& s, const char* column) {
  try {
    return parse_double(s);
  } catch (const FormatError&) {
    throw FormatError(std::string("results csv: column ") + column + ": not a number: '" + s + "'");
  }
}

bool parse_flag(const std::string& s, const char* column) {
  if (s == "0") return false;
  if (s == "1") return true;
  throw FormatError(std::string("results csv: column ") + column + ": expected 0 or 1, got '" + s + "'");
}

void check_text_field(const std::string& s) {
  if (s.find_first_of(",\n\r\"") != std::string::npos) {
    throw std::invalid_argument("results csv: field contains a separator: '" + s + "'");
  }
}

}  // namespace

std::string results_csv_header() {
  return "axis,axis_value,point,repeat,equalizer,modulation,launch_power_dbm,overhead_fraction,noise_seed,"
         "training_seed,fingerprint," +
         QualityReport::csv_header() + ",epochs_run,converged,net_bit_rate_bps,per_subcarrier_q_db";
}

std::string to_csv_line(const ResultRow& r) {
  for (const auto* s : {&r.axis, &r.equalizer, &r.modulation, &r.fingerprint}) check_text_field(*s);
  std::ostringstream os;
  os << r.axis << ',' << format_double(r.axis_value) << ',' << r.point << ',' << r.repeat << ',' << r.equalizer << ','
     << r.modulation << ',' << format_double(r.launch_power_dbm) << ',' << format_double(r.overhead_fraction) << ','
     << r.noise_seed << ',' << r.training_seed << ',' << r.fingerprint << ',' << r.quality.csv_row() << ','
     << r.epochs_run << ',' << (r.converged ? 1 : 0) << ',' << format_double(r.net_bit_rate) << ',';
  for (std::size_t i = 0; i < r.quality.per_subcarrier_q.size(); ++i) {
    if (i) os << ';';
    os << format_double(r.quality.per_subcarrier_q[i]);
  }
  return os.str();
}

ResultRow parse_csv_line(const std::string& line) {
  const auto f = split(line, ',');
  if (f.size() != kColumns) {
    throw FormatError("results csv: expected " + std::to_string(kColumns) + " columns, found " +
                      std::to_string(f.size()));
  }
  ResultRow r;
  r.axis = f[0];
  r.axis_value = parse_number(f[1], "axis_value");
  r.point = parse_unsigned(f[2], "point");
  r.repeat = parse_unsigned(f[3], "repeat");
  r.equalizer = f[4];
  r.modulation = f[5];
  r.launch_power_dbm = parse_number(f[6], "launch_power_dbm");
  r.overhead_fraction = parse_number(f[7], "overhead_fraction");
  r.noise_seed = parse_unsigned(f[8], "noise_seed");
  r.training_seed = parse_unsigned(f[9], "training_seed");
  r.fingerprint = f[10];
  r.quality.ber = parse_number(f[11], "ber");
  r.quality.q_factor_db = parse_number(f[12], "q_factor_db");
  r.quality.error_free = parse_flag(f[13], "error_free");
  r.quality.evm_percent = parse_number(f[14], "evm_percent");
  r.quality.n_bits_counted = parse_unsigned(f[15], "n_bits_counted");
  r.quality.n_errors = parse_unsigned(f[16], "n_errors");
  // f[17], f[18]: min/max subcarrier Q, derived from the list below
  r.epochs_run = parse_unsigned(f[19], "epochs_run");
  r.converged = parse_flag(f[20], "converged");
  r.net_bit_rate = parse_number(f[21], "net_bit_rate_bps");
  if (!f[22].empty()) {
    for (const auto& q : split(f[22], ';')) r.quality.per_subcarrier_q.push_back(parse_number(q, "per_subcarrier_q_db"));
  }
  return r;
}

std::string format_csv(const std::vector<ResultRow>& rows) {
  std::string out = results_csv_header() + '\n';
  for (const auto& r : rows) out += to_csv_line(r) + '\n';
  return out;
}

std::vector<ResultRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != results_csv_header()) throw FormatError("results csv: missing or unexpected header");
  std::vector<ResultRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      rows.push_back(parse_csv_line(line));
    } catch (const FormatError& e) {
      throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return rows;
}

void emit_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path) {
  if (rows.empty()) throw std::invalid_argument("emit_csv: empty results table");
  const auto text = format_csv(rows);
  detail::write_file(path.string(), {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

std::vector<ResultRow> read_csv(const std::filesystem::path& path) {
  const auto bytes = detail::read_file(path.string());
  return parse_csv(std::string(bytes.begin(), bytes.end()));
}

void emit_symbols(const SymbolGrid& symbols, const std::filesystem::path& path) {
  if (symbols.empty()) throw std::invalid_argument("emit_symbols: no symbols");
  std::string text = "re,im\n";
  for (const auto& z : symbols.values()) text += format_double(z.real()) + ',' + format_double(z.imag()) + '\n';
  detail::write_file(path.string(), {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

std::vector<Complex> read_symbols(const std::filesystem::path& path) {
  const auto bytes = detail::read_file(path.string());
  std::istringstream in(std::string(bytes.begin(), bytes.end()));
  std::string line;
  if (!std::getline(in, line) || line != "re,im") throw FormatError("symbols csv: missing 're,im' header");
  std::vector<Complex> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 2) throw FormatError("symbols csv: expected two columns");
    out.emplace_back(parse_double(f[0]), parse_double(f[1]));
  }
  return out;
}

// ---------------------------------------------------------------- SVG

std::string_view to_string(PlotKind k) {
  switch (k) {
    case PlotKind::QVsLop: return "q_vs_lop";
    case PlotKind::QPerSubcarrier: return "q_per_subcarrier";
    case PlotKind::QVsOverhead: return "q_vs_overhead";
    case PlotKind::Constellation: return "constellation";
  }
  return "unknown";
}

PlotKind plot_kind_from_string(std::string_view s) {
  for (auto k : {PlotKind::QVsLop, PlotKind::QPerSubcarrier, PlotKind::QVsOverhead, PlotKind::Constellation}) {
    if (to_string(k) == s) return k;
  }
  throw std::invalid_argument("unknown plot kind '" + std::string(s) +
                              "' (q_vs_lop, q_per_subcarrier, q_vs_overhead, constellation)");
}

namespace {

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

constexpr double kWidth = 640, kHeight = 420, kLeft = 70, kRight = 150, kTop = 30, kBottom = 55;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::pair<double, double> padded_range(double lo, double hi) {
  if (!(hi > lo)) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

std::vector<double> ticks(double lo, double hi) {
  const double raw = (hi - lo) / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> out;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step) out.push_back(std::abs(t) < 1e-12 ? 0.0 : t);
  return out;
}

class Chart {
 public:
  Chart(std::string title, std::string xlabel, std::string ylabel, double x0, double x1, double y0, double y1)
      : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)) {
    std::tie(x0_, x1_) = padded_range(x0, x1);
    std::tie(y0_, y1_) = padded_range(y0, y1);
  }

  double px(double x) const { return kLeft + (x - x0_) / (x1_ - x0_) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - y0_) / (y1_ - y0_) * (kHeight - kTop - kBottom); }

  void add(const std::string& s) { body_ += s; }

  std::string finish() const {
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << kWidth / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">" << title_ << "</text>\n";
    const double xa = kLeft, xb = kWidth - kRight, ya = kTop, yb = kHeight - kBottom;
    os << "<rect x=\"" << xa << "\" y=\"" << ya << "\" width=\"" << xb - xa << "\" height=\"" << yb - ya
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double t : ticks(x0_, x1_)) {
      os << "<line x1=\"" << num(px(t)) << "\" y1=\"" << yb << "\" x2=\"" << num(px(t)) << "\" y2=\"" << yb + 5
         << "\" stroke=\"black\"/><text x=\"" << num(px(t)) << "\" y=\"" << yb + 18 << "\" text-anchor=\"middle\">"
         << num(t) << "</text>\n";
    }
    for (double t : ticks(y0_, y1_)) {
      os << "<line x1=\"" << xa - 5 << "\" y1=\"" << num(py(t)) << "\" x2=\"" << xa << "\" y2=\"" << num(py(t))
         << "\" stroke=\"black\"/><text x=\"" << xa - 8 << "\" y=\"" << num(py(t) + 4) << "\" text-anchor=\"end\">"
         << num(t) << "</text>\n";
    }
    os << "<text x=\"" << (xa + xb) / 2 << "\" y=\"" << kHeight - 15 << "\" text-anchor=\"middle\">" << xlabel_
       << "</text>\n";
    os << "<text transform=\"translate(18," << (ya + yb) / 2 << ") rotate(-90)\" text-anchor=\"middle\">" << ylabel_
       << "</text>\n";
    os << body_ << "</svg>\n";
    return os.str();
  }

 private:
  std::string title_, xlabel_, ylabel_, body_;
  double x0_ = 0, x1_ = 1, y0_ = 0, y1_ = 1;
};

std::string line_chart(const std::vector<Series>& series, const std::string& title, const std::string& xlabel,
                       const std::string& ylabel, bool markers) {
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(y)) continue;
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  if (!std::isfinite(x0) || !std::isfinite(y0)) throw std::invalid_argument("plot: no finite data points");
  Chart chart(title, xlabel, ylabel, x0, x1, y0, y1);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* colour = kPalette[i % std::size(kPalette)];
    std::string path;
    for (const auto& [x, y] : series[i].points) {
      if (!std::isfinite(y)) continue;
      path += (path.empty() ? "" : " ") + num(chart.px(x)) + "," + num(chart.py(y));
      if (markers) {
        chart.add("<circle cx=\"" + num(chart.px(x)) + "\" cy=\"" + num(chart.py(y)) + "\" r=\"3\" fill=\"" + colour +
                  "\"/>\n");
      }
    }
    chart.add("<polyline fill=\"none\" stroke=\"" + std::string(colour) + "\" stroke-width=\"1.5\" points=\"" + path +
              "\"/>\n");
    const double ly = kTop + 15.0 + 18.0 * static_cast<double>(i);
    const double lx = kWidth - kRight + 10.0;
    chart.add("<line x1=\"" + num(lx) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(lx + 20) + "\" y2=\"" + num(ly) +
              "\" stroke=\"" + colour + "\" stroke-width=\"2\"/><text x=\"" + num(lx + 25) + "\" y=\"" +
              num(ly + 4) + "\">" + series[i].name + "</text>\n");
  }
  return chart.finish();
}

// Mean Q per (equalizer, x) with equalizers in first-appearance order.
std::vector<Series> mean_q_series(const std::vector<ResultRow>& rows, double ResultRow::*x) {
  std::vector<std::string> order;
  std::map<std::string, std::map<double, std::pair<double, int>>> acc;
  for (const auto& r : rows) {
    if (!acc.count(r.equalizer)) order.push_back(r.equalizer);
    auto& cell = acc[r.equalizer][r.*x];
    cell.first += r.quality.q_factor_db;
    cell.second += 1;
  }
  std::vector<Series> out;
  for (const auto& name : order) {
    Series s{name, {}};
    for (const auto& [xv, cell] : acc[name]) s.points.emplace_back(xv, cell.first / cell.second);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

std::string render_plot(const std::vector<ResultRow>& rows, PlotKind kind) {
  if (rows.empty()) throw std::invalid_argument("plot: empty results table");
  switch (kind) {
    case PlotKind::QVsLop:
      return line_chart(mean_q_series(rows, &ResultRow::launch_power_dbm), "Q-factor vs launch power",
                        "Launch power per channel (dBm)", "Q-factor (dB)", true);
    case PlotKind::QVsOverhead: {
      auto series = mean_q_series(rows, &ResultRow::overhead_fraction);
      for (auto& s : series)
        for (auto& p : s.points) p.first *= 100.0;
      return line_chart(series, "Q-factor vs training overhead", "Training overhead (%)", "Q-factor (dB)", true);
    }
    case PlotKind::QPerSubcarrier: {
      std::vector<std::string> order;
      std::map<std::string, std::pair<std::vector<double>, int>> acc;
      for (const auto& r : rows) {
        auto& cell = acc[r.equalizer];
        if (cell.second == 0) {
          order.push_back(r.equalizer);
          cell.first.assign(r.quality.per_subcarrier_q.size(), 0.0);
        }
        if (cell.first.size() != r.quality.per_subcarrier_q.size()) {
          throw std::invalid_argument("plot: rows disagree on the subcarrier count");
        }
        for (std::size_t k = 0; k < cell.first.size(); ++k) cell.first[k] += r.quality.per_subcarrier_q[k];
        cell.second += 1;
      }
      std::vector<Series> series;
      for (const auto& name : order) {
        Series s{name, {}};
        const auto& [sum, n] = acc[name];
        for (std::size_t k = 0; k < sum.size(); ++k) s.points.emplace_back(static_cast<double>(k + 1), sum[k] / n);
        series.push_back(std::move(s));
      }
      return line_chart(series, "Q-factor per subcarrier", "Data subcarrier index", "Q-factor (dB)", false);
    }
    case PlotKind::Constellation:
      throw std::invalid_argument("plot: constellation plots are rendered from a symbols file");
  }
  return {};
}

std::string render_constellation(const std::vector<Complex>& symbols) {
  if (symbols.empty()) throw std::invalid_argument("plot: no symbols");
  double extent = 0.0;
  for (const auto& z : symbols) {
    if (std::isfinite(z.real()) && std::isfinite(z.imag())) extent = std::max({extent, std::abs(z.real()), std::abs(z.imag())});
  }
  if (extent == 0.0) extent = 1.0;
  Chart chart("Received constellation", "In-phase", "Quadrature", -extent, extent, -extent, extent);
  // one marker per occupied pixel keeps large clouds renderable
  std::set<std::pair<long, long>> seen;
  for (const auto& z : symbols) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) continue;
    const double x = chart.px(z.real());
    const double y = chart.py(z.imag());
    if (!seen.insert({std::lround(x), std::lround(y)}).second) continue;
    chart.add("<circle cx=\"" + num(std::round(x)) + "\" cy=\"" + num(std::round(y)) +
              "\" r=\"1.5\" fill=\"#1f77b4\"/>\n");
  }
  return chart.finish();
}

void emit_plot(const std::vector<ResultRow>& rows, PlotKind kind, const std::filesystem::path& path) {
  const auto svg = render_plot(rows, kind);
  detail::write_file(path.string(), {reinterpret_cast<const std::uint8_t*>(svg.data()), svg.size()});
}

void emit_constellation(const std::vector<Complex>& symbols, const std::filesystem::path& path) {
  const auto svg = render_constellation(symbols);
  detail::write_file(path.string(), {reinterpret_cast<const std::uint8_t*>(svg.data()), svg.size()});
}

}  // namespace cooflab
