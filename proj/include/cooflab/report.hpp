#ifndef COOFLAB_REPORT_HPP
#define COOFLAB_REPORT_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "cooflab/scenario.hpp"

namespace cooflab {

/// One line of a results table: the sweep coordinates of a run plus its
/// quality metrics. Wall time is deliberately absent so that tables are
/// byte-identical across repeated runs.
struct ResultRow {
  std::string axis = "none";
  double axis_value = 0.0;
  std::size_t point = 0;
  std::size_t repeat = 0;
  std::string equalizer;
  std::string modulation;
  double launch_power_dbm = 0.0;
  double overhead_fraction = 0.0;
  std::uint64_t noise_seed = 0;
  std::uint64_t training_seed = 0;
  std::string fingerprint;
  QualityReport quality;
  std::size_t epochs_run = 0;
  bool converged = false;
  double net_bit_rate = 0.0;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

ResultRow make_row(const ScenarioConfig& cfg, const RunResult& r);

/// Header of the results CSV. Columns: axis, axis_value, point, repeat,
/// equalizer, modulation, launch_power_dbm, overhead_fraction, noise_seed,
/// training_seed, fingerprint, the QualityReport columns, epochs_run,
/// converged, net_bit_rate_bps, per_subcarrier_q_db (semicolon separated).
std::string results_csv_header();
std::string to_csv_line(const ResultRow& row);
ResultRow parse_csv_line(const std::string& line);

std::string format_csv(const std::vector<ResultRow>& rows);
std::vector<ResultRow> parse_csv(const std::string& text);

/// Writes the table; an empty table is rejected before any file is created.
void emit_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path);
std::vector<ResultRow> read_csv(const std::filesystem::path& path);

/// Equalized symbols as "re,im" lines for constellation plots.
void emit_symbols(const SymbolGrid& symbols, const std::filesystem::path& path);
std::vector<Complex> read_symbols(const std::filesystem::path& path);

enum class PlotKind { QVsLop, QPerSubcarrier, QVsOverhead, Constellation };
std::string_view to_string(PlotKind k);
PlotKind plot_kind_from_string(std::string_view s);

/// Static SVG renderings. Q plots average repeats per (equalizer, x); the
/// per-subcarrier plot averages every row of each equalizer.
std::string render_plot(const std::vector<ResultRow>& rows, PlotKind kind);
std::string render_constellation(const std::vector<Complex>& symbols);

void emit_plot(const std::vector<ResultRow>& rows, PlotKind kind, const std::filesystem::path& path);
void emit_constellation(const std::vector<Complex>& symbols, const std::filesystem::path& path);

}  // namespace cooflab

#endif  // COOFLAB_REPORT_HPP
