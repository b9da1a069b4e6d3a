#ifndef COOFLAB_SWEEP_HPP
#define COOFLAB_SWEEP_HPP

#include <functional>
#include <string>
#include <vector>

#include "cooflab/report.hpp"

namespace cooflab {

enum class SweepAxis { LaunchPower, Overhead, Case };

std::string_view to_string(SweepAxis a);
SweepAxis sweep_axis_from_string(std::string_view s);

struct SweepSpec {
  SweepAxis axis = SweepAxis::LaunchPower;
  std::vector<double> values;
  std::size_t repeats = 3;
  /// Equalizers evaluated at every point; empty means the configured one.
  /// On the case axis each point selects its own MIMO-DL case instead.
  std::vector<EqualizerSpec> equalizers;
  std::size_t workers = 0;  // 0: hardware concurrency
};

/// Name of the environment variable that overrides the worker count.
inline constexpr const char* kWorkersEnv = "COOFLAB_WORKERS";

/// Worker count after applying the environment override (always >= 1).
std::size_t resolve_workers(std::size_t requested);

/// Configuration of one sweep point and repeat. Repeat 0 keeps the base
/// seeds; later repeats derive fresh noise and training seeds.
ScenarioConfig point_config(const ScenarioConfig& base, SweepAxis axis, double value, std::size_t repeat);

/// Equalizers run at a point.
std::vector<EqualizerSpec> point_equalizers(const ScenarioConfig& base, const SweepSpec& spec, double value);

/// Validates every point before running any; rows come back ordered by
/// (point, repeat, equalizer) whatever the execution order. Points that
/// share a link (same transmitter, channel and noise) propagate it once.
std::vector<ResultRow> run_sweep(const ScenarioConfig& base, const SweepSpec& spec,
                                 const std::function<void(const ResultRow&)>& on_result = {});

struct PointSummary {
  double axis_value = 0.0;
  std::string equalizer;
  double mean_q_db = 0.0;
  double min_q_db = 0.0;
  double max_q_db = 0.0;
  std::size_t n = 0;
};

/// Mean, min and max Q per (axis value, equalizer) in row order.
std::vector<PointSummary> summarize(const std::vector<ResultRow>& rows);

}  // namespace cooflab

#endif  // COOFLAB_SWEEP_HPP
