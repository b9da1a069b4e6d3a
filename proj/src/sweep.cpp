#include "cooflab/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <thread>

#include "cooflab/random.hpp"

namespace cooflab {

std::string_view to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::LaunchPower: return "launch_power_dbm";
    case SweepAxis::Overhead: return "overhead";
    case SweepAxis::Case: return "case";
  }
  return "unknown";
}

SweepAxis sweep_axis_from_string(std::string_view s) {
  for (auto a : {SweepAxis::LaunchPower, SweepAxis::Overhead, SweepAxis::Case}) {
    if (to_string(a) == s) return a;
  }
  throw ConfigError("sweep.axis", "unknown axis '" + std::string(s) + "' (launch_power_dbm, overhead, case)");
}

std::size_t resolve_workers(std::size_t requested) {
  if (const char* env = std::getenv(kWorkersEnv); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) {
      throw ConfigError(kWorkersEnv, std::string("must be a positive integer, got '") + env + "'");
    }
    return static_cast<std::size_t>(v);
  }
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

ScenarioConfig point_config(const ScenarioConfig& base, SweepAxis axis, double value, std::size_t repeat) {
  ScenarioConfig cfg = base;
  switch (axis) {
    case SweepAxis::LaunchPower:
      cfg.link.launch_power_dbm = value;
      break;
    case SweepAxis::Overhead:
      cfg.training.overhead_fraction = value;
      break;
    case SweepAxis::Case: {
      if (value != std::round(value) || value < 1.0 || value > 4.0) {
        throw ConfigError("sweep.values", "case values must be 1, 2, 3 or 4");
      }
      cfg.equalizer.kind = EqualizerKind::MimoDl;
      cfg.equalizer.group_case = static_cast<GroupCase>(static_cast<int>(value));
      break;
    }
  }
  if (repeat > 0) {
    cfg.seeds.noise = derive_seed(base.seeds.noise, repeat);
    cfg.seeds.training = derive_seed(base.seeds.training, repeat);
  }
  cfg.training.seed = cfg.seeds.training;
  return cfg;
}

std::vector<EqualizerSpec> point_equalizers(const ScenarioConfig& base, const SweepSpec& spec, double value) {
  if (spec.axis == SweepAxis::Case) return {point_config(base, spec.axis, value, 0).equalizer};
  if (spec.equalizers.empty()) return {base.equalizer};
  return spec.equalizers;
}

namespace {

struct Task {
  std::size_t point = 0;
  std::size_t repeat = 0;
  EqualizerSpec equalizer;
  ScenarioConfig config;
};

}  // namespace

std::vector<ResultRow> run_sweep(const ScenarioConfig& base, const SweepSpec& spec,
                                 const std::function<void(const ResultRow&)>& on_result) {
  if (spec.values.empty()) throw ConfigError("sweep.values", "no sweep points given");
  if (spec.repeats == 0) throw ConfigError("sweep.repeats", "must be >= 1");

  std::vector<Task> tasks;
  for (std::size_t p = 0; p < spec.values.size(); ++p) {
    for (std::size_t r = 0; r < spec.repeats; ++r) {
      const auto cfg = point_config(base, spec.axis, spec.values[p], r);
      for (const auto& eq : point_equalizers(base, spec, spec.values[p])) {
        auto checked = cfg;
        checked.equalizer = eq;
        try {
          checked.validate();
        } catch (const ConfigError& e) {
          throw ConfigError(e.field(), "sweep point " + std::to_string(p) + " (" + std::string(to_string(spec.axis)) +
                                           " = " + std::to_string(spec.values[p]) + "): " + e.what());
        }
        tasks.push_back({p, r, eq, checked});
      }
    }
  }

  // Group tasks sharing a link; groups keep first-appearance order.
  std::vector<std::vector<std::size_t>> groups;
  std::map<std::string, std::size_t> group_of;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto key = link_key(tasks[i].config);
    auto [it, inserted] = group_of.emplace(key, groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(i);
  }

  std::vector<ResultRow> rows(tasks.size());
  std::atomic<std::size_t> next{0};
  std::mutex mutex;
  std::exception_ptr failure;

  auto worker = [&]() {
    for (;;) {
      const std::size_t g = next.fetch_add(1);
      if (g >= groups.size()) return;
      {
        std::lock_guard lock(mutex);
        if (failure) return;
      }
      try {
        const auto sim = simulate_link(tasks[groups[g].front()].config);
        for (std::size_t i : groups[g]) {
          const auto& t = tasks[i];
          const auto result = evaluate_receiver(sim, t.config);
          auto row = make_row(t.config, result);
          row.axis = std::string(to_string(spec.axis));
          row.axis_value = spec.values[t.point];
          row.point = t.point;
          row.repeat = t.repeat;
          std::lock_guard lock(mutex);
          rows[i] = row;
          if (on_result) on_result(row);
        }
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  const std::size_t n_workers = std::min(resolve_workers(spec.workers), groups.size());
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

std::vector<PointSummary> summarize(const std::vector<ResultRow>& rows) {
  std::vector<PointSummary> out;
  std::map<std::pair<double, std::string>, std::size_t> index;
  for (const auto& r : rows) {
    auto [it, inserted] = index.emplace(std::make_pair(r.axis_value, r.equalizer), out.size());
    if (inserted) {
      out.push_back({r.axis_value, r.equalizer, 0.0, r.quality.q_factor_db, r.quality.q_factor_db, 0});
    }
    auto& s = out[it->second];
    s.mean_q_db += r.quality.q_factor_db;
    s.min_q_db = std::min(s.min_q_db, r.quality.q_factor_db);
    s.max_q_db = std::max(s.max_q_db, r.quality.q_factor_db);
    s.n += 1;
  }
  for (auto& s : out) s.mean_q_db /= static_cast<double>(s.n);
  return out;
}

}  // namespace cooflab
