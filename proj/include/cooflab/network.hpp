#ifndef COOFLAB_NETWORK_HPP
#define COOFLAB_NETWORK_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "cooflab/types.hpp"

namespace cooflab {

enum class GroupCase : std::uint32_t { Case1 = 1, Case2 = 2, Case3 = 3, Case4 = 4, PerSubcarrier = 100, Custom = 200 };
enum class GroupRole : std::uint32_t { Edge = 0, Middle = 1 };

std::string_view to_string(GroupCase c);

struct SubcarrierGroup {
  std::size_t first = 0;
  std::size_t size = 0;
  GroupRole role = GroupRole::Edge;
};

/// Contiguous partition of the data subcarriers into independently
/// equalized groups. Each group is one hidden layer of the grouped network.
struct GroupPlan {
  GroupCase case_id = GroupCase::Custom;
  std::vector<SubcarrierGroup> groups;

  /// Block-size cases for 210 subcarriers: middle block of 50 / 100 / 150
  /// flanked by two edge groups, or Case4 with groups {51, 54, 54, 51}.
  static GroupPlan for_case(GroupCase c, std::size_t n_subcarriers = 210);
  /// One single-subcarrier group per subcarrier (the conventional ANN).
  static GroupPlan per_subcarrier(std::size_t n_subcarriers = 210);
  /// Consecutive groups of the given sizes; the largest is tagged middle.
  static GroupPlan custom(const std::vector<std::size_t>& sizes);

  std::size_t n_subcarriers() const;
  std::size_t n_hidden_layers() const { return groups.size(); }
  void validate(std::size_t n_subcarriers) const;
};

/// Fully connected single-hidden-layer complex network for one group:
/// h = phi(W_in x + b_in), y = W_out h + b_out, with phi the split tanh.
struct SubNetwork {
  std::size_t first = 0;
  Eigen::MatrixXcd w_in;   // hidden x inputs
  Eigen::VectorXcd b_in;   // hidden
  Eigen::MatrixXcd w_out;  // inputs x hidden
  Eigen::VectorXcd b_out;  // inputs

  std::size_t inputs() const { return static_cast<std::size_t>(w_in.cols()); }
  std::size_t hidden() const { return static_cast<std::size_t>(w_in.rows()); }
  std::size_t n_parameters() const;
};

/// The grouped MIMO equalizer: one sub-network per group, hidden width
/// 3 * M per subcarrier of the group.
class GroupedNetwork {
 public:
  static constexpr std::size_t kHiddenPerSubcarrierPerLevel = 3;

  GroupedNetwork() = default;
  GroupedNetwork(GroupPlan plan, std::size_t constellation_order, std::uint64_t seed,
                 std::vector<SubNetwork> subnets);

  const GroupPlan& plan() const { return plan_; }
  std::size_t constellation_order() const { return order_; }
  std::uint64_t seed() const { return seed_; }
  std::span<const SubNetwork> subnets() const { return subnets_; }
  std::span<SubNetwork> subnets() { return subnets_; }

  /// Hidden units over all groups.
  std::size_t total_neurons() const;
  /// Complex parameter count.
  std::size_t n_parameters() const;
  bool all_finite() const;

  /// Parameters flattened group by group as w_in (row-major), b_in,
  /// w_out (row-major), b_out.
  std::vector<Complex> parameters() const;
  void set_parameters(std::span<const Complex> values);

  /// Equalizes every row of rx (columns = data subcarriers).
  SymbolGrid forward(const SymbolGrid& rx) const;

 private:
  GroupPlan plan_;
  std::size_t order_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<SubNetwork> subnets_;
};

/// Split-complex activation: tanh on real and imaginary parts separately.
inline Complex sigmoid_split(Complex z) { return {std::tanh(z.real()), std::tanh(z.imag())}; }

/// Weights and biases uniform in [-0.1, 0.1] on both parts, deterministic per seed.
GroupedNetwork build_network(const GroupPlan& plan, std::size_t constellation_order, std::uint64_t seed);

struct RpropParams {
  double delta0 = 0.07;
  double eta_plus = 1.2;
  double eta_minus = 0.5;
  double delta_min = 1e-6;
  double delta_max = 50.0;
};

struct TrainingConfig {
  double overhead_fraction = 0.10;
  RpropParams rprop;
  double stop_threshold = 0.0;      // stop once cost <= this
  std::size_t plateau_window = 10;  // stop once cost moved < plateau_tolerance over this many epochs
  double plateau_tolerance = 1e-6;
  std::size_t max_epochs = 500;
  double learning_rate = 1.0;  // scales delta0 into the initial step
  std::uint64_t seed = 3;

  void validate() const;
};

struct TrainingRecord {
  std::vector<double> cost_per_epoch;  // cost before each update
  std::size_t epochs_run = 0;
  bool converged = false;
};

class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mean over symbol instants of the squared error norm, summed over groups.
double network_cost(const GroupedNetwork& net, const SymbolGrid& rx, const SymbolGrid& tx);

/// Gradient of network_cost w.r.t. the real and imaginary parts of every
/// parameter, packed as dE/dRe + i dE/dIm in parameters() order.
std::vector<Complex> network_gradient(const GroupedNetwork& net, const SymbolGrid& rx, const SymbolGrid& tx);

struct TrainingResult {
  GroupedNetwork network;
  TrainingRecord record;
};

/// Full-batch complex resilient back-propagation (iRprop-, applied to real
/// and imaginary parts independently).
TrainingResult train_rprop(GroupedNetwork net, const SymbolGrid& tx_training, const SymbolGrid& rx_training,
                           const TrainingConfig& cfg);

/// Applies a trained network; rejects non-finite weights.
SymbolGrid equalize_grouped(const GroupedNetwork& net, const SymbolGrid& rx);

/// 210 independent single-subcarrier networks sharing the same engine.
TrainingResult ann_per_subcarrier_train(const SymbolGrid& tx_training, const SymbolGrid& rx_training,
                                        std::size_t constellation_order, const TrainingConfig& cfg);
SymbolGrid ann_per_subcarrier_equalize(const GroupedNetwork& net, const SymbolGrid& rx);

/// Binary network blob: "CLNW", u32 version, u32 case, u32 M, u64 seed,
/// u32 n_groups, per group {u32 first, u32 size, u32 role, u32 hidden},
/// u64 n_values, then little-endian f64 (re, im) pairs in parameters() order.
std::vector<std::uint8_t> serialize_network(const GroupedNetwork& net);
GroupedNetwork deserialize_network(std::span<const std::uint8_t> blob);
void save_network(const GroupedNetwork& net, const std::filesystem::path& path);
GroupedNetwork load_network(const std::filesystem::path& path);

}  // namespace cooflab

#endif  // COOFLAB_NETWORK_HPP
