#include "cooflab/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "binary_io.hpp"
#include "cooflab/random.hpp"

namespace cooflab {

std::string_view to_string(GroupCase c) {
  switch (c) {
    case GroupCase::Case1: return "case1";
    case GroupCase::Case2: return "case2";
    case GroupCase::Case3: return "case3";
    case GroupCase::Case4: return "case4";
    case GroupCase::PerSubcarrier: return "per_subcarrier";
    case GroupCase::Custom: return "custom";
  }
  return "unknown";
}

// ---------------------------------------------------------------- plans

GroupPlan GroupPlan::custom(const std::vector<std::size_t>& sizes) {
  GroupPlan plan;
  std::size_t first = 0;
  const auto largest = std::max_element(sizes.begin(), sizes.end());
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const bool middle = sizes.begin() + static_cast<std::ptrdiff_t>(i) == largest && sizes.size() > 1;
    plan.groups.push_back({first, sizes[i], middle ? GroupRole::Middle : GroupRole::Edge});
    first += sizes[i];
  }
  return plan;
}

GroupPlan GroupPlan::for_case(GroupCase c, std::size_t n) {
  auto three = [n](std::size_t middle) {
    if (middle >= n || (n - middle) % 2 != 0) {
      throw ConfigError("equalizer.case", "middle block " + std::to_string(middle) + " does not fit " +
                                              std::to_string(n) + " subcarriers symmetrically");
    }
    const std::size_t edge = (n - middle) / 2;
    GroupPlan p;
    p.groups = {{0, edge, GroupRole::Edge}, {edge, middle, GroupRole::Middle}, {edge + middle, edge, GroupRole::Edge}};
    return p;
  };
  GroupPlan plan;
  switch (c) {
    case GroupCase::Case1: plan = three(50); break;
    case GroupCase::Case2: plan = three(100); break;
    case GroupCase::Case3: plan = three(150); break;
    case GroupCase::Case4: {
      if (n != 210) throw ConfigError("equalizer.case", "case4 grouping {51, 54, 54, 51} needs 210 subcarriers");
      plan.groups = {{0, 51, GroupRole::Edge}, {51, 54, GroupRole::Middle}, {105, 54, GroupRole::Middle},
                     {159, 51, GroupRole::Edge}};
      break;
    }
    case GroupCase::PerSubcarrier: return per_subcarrier(n);
    case GroupCase::Custom: throw ConfigError("equalizer.case", "custom plans are built with GroupPlan::custom");
  }
  plan.case_id = c;
  return plan;
}

GroupPlan GroupPlan::per_subcarrier(std::size_t n) {
  GroupPlan plan;
  plan.case_id = GroupCase::PerSubcarrier;
  for (std::size_t k = 0; k < n; ++k) plan.groups.push_back({k, 1, GroupRole::Edge});
  return plan;
}

std::size_t GroupPlan::n_subcarriers() const {
  return std::accumulate(groups.begin(), groups.end(), std::size_t{0},
                         [](std::size_t acc, const SubcarrierGroup& g) { return acc + g.size; });
}

void GroupPlan::validate(std::size_t n) const {
  if (groups.empty()) throw ConfigError("equalizer.groups", "plan has no groups");
  std::size_t expected = 0;
  for (const auto& g : groups) {
    if (g.size == 0) throw ConfigError("equalizer.groups", "empty group");
    if (g.first != expected) throw ConfigError("equalizer.groups", "groups must be contiguous and non-overlapping");
    expected += g.size;
  }
  if (expected != n) {
    throw ConfigError("equalizer.groups", "groups cover " + std::to_string(expected) + " of " + std::to_string(n) +
                                              " subcarriers");
  }
}

// ---------------------------------------------------------------- network

std::size_t SubNetwork::n_parameters() const {
  return static_cast<std::size_t>(w_in.size() + b_in.size() + w_out.size() + b_out.size());
}

GroupedNetwork::GroupedNetwork(GroupPlan plan, std::size_t order, std::uint64_t seed, std::vector<SubNetwork> subnets)
    : plan_(std::move(plan)), order_(order), seed_(seed), subnets_(std::move(subnets)) {
  if (subnets_.size() != plan_.groups.size()) throw std::invalid_argument("GroupedNetwork: one sub-network per group");
}

std::size_t GroupedNetwork::total_neurons() const {
  std::size_t n = 0;
  for (const auto& s : subnets_) n += s.hidden();
  return n;
}

std::size_t GroupedNetwork::n_parameters() const {
  std::size_t n = 0;
  for (const auto& s : subnets_) n += s.n_parameters();
  return n;
}

namespace {

bool finite(const Eigen::MatrixXcd& m) {
  return std::all_of(m.data(), m.data() + m.size(),
                     [](const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}
bool finite(const Eigen::VectorXcd& v) {
  return std::all_of(v.data(), v.data() + v.size(),
                     [](const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

// Visits the parameter blocks of a sub-network in serialization order.
// Eigen matrices are column-major, so w_in / w_out are walked row by row.
template <typename Net, typename Fn>
void for_each_parameter(Net& s, Fn&& fn) {
  for (Eigen::Index r = 0; r < s.w_in.rows(); ++r)
    for (Eigen::Index c = 0; c < s.w_in.cols(); ++c) fn(s.w_in(r, c));
  for (Eigen::Index i = 0; i < s.b_in.size(); ++i) fn(s.b_in(i));
  for (Eigen::Index r = 0; r < s.w_out.rows(); ++r)
    for (Eigen::Index c = 0; c < s.w_out.cols(); ++c) fn(s.w_out(r, c));
  for (Eigen::Index i = 0; i < s.b_out.size(); ++i) fn(s.b_out(i));
}

Eigen::MatrixXcd group_inputs(const SymbolGrid& grid, std::size_t first, std::size_t size) {
  Eigen::MatrixXcd x(static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(grid.rows()));
  for (std::size_t t = 0; t < grid.rows(); ++t)
    for (std::size_t i = 0; i < size; ++i) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) = grid(t, first + i);
  return x;
}

// Vectorized over the interleaved parts: tanh(x) = sign(x) (1 - e) / (1 + e), e = exp(-2|x|).
Eigen::MatrixXcd split_tanh(const Eigen::MatrixXcd& z) {
  Eigen::MatrixXcd h(z.rows(), z.cols());
  const Eigen::Index n = 2 * z.size();
  const Eigen::Map<const Eigen::ArrayXd> in(reinterpret_cast<const double*>(z.data()), n);
  Eigen::Map<Eigen::ArrayXd> out(reinterpret_cast<double*>(h.data()), n);
  const Eigen::ArrayXd e = (-2.0 * in.abs()).exp();
  out = in.sign() * (1.0 - e) / (1.0 + e);
  return h;
}

Eigen::MatrixXcd subnet_forward(const SubNetwork& s, const Eigen::MatrixXcd& x) {
  Eigen::MatrixXcd z = s.w_in * x;
  z.colwise() += s.b_in;
  Eigen::MatrixXcd y = s.w_out * split_tanh(z);
  y.colwise() += s.b_out;
  return y;
}

struct SubGradient {
  Eigen::MatrixXcd w_in;
  Eigen::VectorXcd b_in;
  Eigen::MatrixXcd w_out;
  Eigen::VectorXcd b_out;
};

// Cost (1/T) sum_t ||y_t - s_t||^2 and, if requested, its gradient packed
// as dE/dRe + i dE/dIm for every parameter.
double subnet_cost(const SubNetwork& s, const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& target, SubGradient* grad) {
  const double t = static_cast<double>(x.cols());
  Eigen::MatrixXcd z = s.w_in * x;
  z.colwise() += s.b_in;
  const Eigen::MatrixXcd h = split_tanh(z);
  Eigen::MatrixXcd e = s.w_out * h;
  e.colwise() += s.b_out;
  e -= target;
  const double cost = e.squaredNorm() / t;
  if (grad != nullptr) {
    const double scale = 2.0 / t;
    grad->w_out.noalias() = scale * e * h.adjoint();
    grad->b_out = scale * e.rowwise().sum();
    Eigen::MatrixXcd dz = scale * (s.w_out.adjoint() * e);
    dz = dz.binaryExpr(h, [](const Complex& d, const Complex& a) {
      return Complex(d.real() * (1.0 - a.real() * a.real()), d.imag() * (1.0 - a.imag() * a.imag()));
    });
    grad->w_in.noalias() = dz * x.adjoint();
    grad->b_in = dz.rowwise().sum();
  }
  return cost;
}

void check_training_shapes(const GroupedNetwork& net, const SymbolGrid& rx, const SymbolGrid& tx) {
  if (rx.rows() != tx.rows() || rx.cols() != tx.cols()) throw std::invalid_argument("network: rx/tx shape mismatch");
  if (rx.cols() != net.plan().n_subcarriers()) {
    throw std::invalid_argument("network: grid has " + std::to_string(rx.cols()) + " columns, plan covers " +
                                std::to_string(net.plan().n_subcarriers()));
  }
  if (rx.rows() == 0) throw std::invalid_argument("network: no training symbols");
}

}  // namespace

bool GroupedNetwork::all_finite() const {
  return std::all_of(subnets_.begin(), subnets_.end(), [](const SubNetwork& s) {
    return finite(s.w_in) && finite(s.b_in) && finite(s.w_out) && finite(s.b_out);
  });
}

std::vector<Complex> GroupedNetwork::parameters() const {
  std::vector<Complex> out;
  out.reserve(n_parameters());
  for (const auto& s : subnets_) for_each_parameter(s, [&](const Complex& v) { out.push_back(v); });
  return out;
}

void GroupedNetwork::set_parameters(std::span<const Complex> values) {
  if (values.size() != n_parameters()) throw std::invalid_argument("set_parameters: wrong parameter count");
  std::size_t i = 0;
  for (auto& s : subnets_) for_each_parameter(s, [&](Complex& v) { v = values[i++]; });
}

SymbolGrid GroupedNetwork::forward(const SymbolGrid& rx) const {
  if (rx.cols() != plan_.n_subcarriers()) throw std::invalid_argument("forward: column count does not match the plan");
  SymbolGrid out(rx.rows(), rx.cols());
  for (const auto& s : subnets_) {
    const auto y = subnet_forward(s, group_inputs(rx, s.first, s.inputs()));
    for (std::size_t t = 0; t < rx.rows(); ++t)
      for (std::size_t i = 0; i < s.inputs(); ++i)
        out(t, s.first + i) = y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t));
  }
  return out;
}

GroupedNetwork build_network(const GroupPlan& plan, std::size_t order, std::uint64_t seed) {
  plan.validate(plan.n_subcarriers());
  if (order < 2) throw ConfigError("constellation", "order must be >= 2");
  Rng rng(seed);
  auto draw = [&rng]() { return Complex(rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1)); };
  std::vector<SubNetwork> subnets;
  subnets.reserve(plan.groups.size());
  for (const auto& g : plan.groups) {
    const auto n = static_cast<Eigen::Index>(g.size);
    const auto h = static_cast<Eigen::Index>(GroupedNetwork::kHiddenPerSubcarrierPerLevel * order * g.size);
    SubNetwork s;
    s.first = g.first;
    s.w_in.resize(h, n);
    s.b_in.resize(h);
    s.w_out.resize(n, h);
    s.b_out.resize(n);
    for_each_parameter(s, [&](Complex& v) { v = draw(); });
    subnets.push_back(std::move(s));
  }
  return GroupedNetwork(plan, order, seed, std::move(subnets));
}

void TrainingConfig::validate() const {
  if (!(overhead_fraction > 0.0 && overhead_fraction < 1.0)) throw ConfigError("training.overhead_fraction", "must be in (0, 1)");
  if (!(rprop.eta_minus > 0.0 && rprop.eta_minus < 1.0 && rprop.eta_plus > 1.0)) {
    throw ConfigError("training.rprop", "require 0 < eta_minus < 1 < eta_plus");
  }
  if (!(rprop.delta_min > 0.0 && rprop.delta_min <= rprop.delta_max)) {
    throw ConfigError("training.rprop", "require 0 < delta_min <= delta_max");
  }
  if (!(rprop.delta0 > 0.0)) throw ConfigError("training.rprop.delta0", "must be > 0");
  if (!(learning_rate > 0.0)) throw ConfigError("training.learning_rate", "must be > 0");
  if (max_epochs == 0) throw ConfigError("training.max_epochs", "must be >= 1");
}

double network_cost(const GroupedNetwork& net, const SymbolGrid& rx, const SymbolGrid& tx) {
  check_training_shapes(net, rx, tx);
  double cost = 0.0;
  for (const auto& s : net.subnets()) {
    cost += subnet_cost(s, group_inputs(rx, s.first, s.inputs()), group_inputs(tx, s.first, s.inputs()), nullptr);
  }
  return cost;
}

std::vector<Complex> network_gradient(const GroupedNetwork& net, const SymbolGrid& rx, const SymbolGrid& tx) {
  check_training_shapes(net, rx, tx);
  std::vector<Complex> out;
  out.reserve(net.n_parameters());
  for (const auto& s : net.subnets()) {
    SubGradient g;
    subnet_cost(s, group_inputs(rx, s.first, s.inputs()), group_inputs(tx, s.first, s.inputs()), &g);
    for_each_parameter(g, [&](const Complex& v) { out.push_back(v); });
  }
  return out;
}

namespace {

// Per-part iRprop- state for one block of complex parameters.
struct RpropBlock {
  Eigen::MatrixXcd step;
  Eigen::MatrixXcd previous;

  RpropBlock(Eigen::Index rows, Eigen::Index cols, double initial)
      : step(Eigen::MatrixXcd::Constant(rows, cols, Complex(initial, initial))),
        previous(Eigen::MatrixXcd::Zero(rows, cols)) {}

  template <typename Params, typename Grad>
  void update(Params& w, const Grad& g, const RpropParams& p) {
    const Eigen::Index n = w.size();
    Complex* wp = w.data();
    const Complex* gp = g.data();
    Complex* sp = step.data();
    Complex* pp = previous.data();
    for (Eigen::Index i = 0; i < n; ++i) {
      double wr = wp[i].real(), wi = wp[i].imag();
      double sr = sp[i].real(), si = sp[i].imag();
      double pr = pp[i].real(), pi = pp[i].imag();
      apply(wr, sr, pr, gp[i].real(), p);
      apply(wi, si, pi, gp[i].imag(), p);
      wp[i] = {wr, wi};
      sp[i] = {sr, si};
      pp[i] = {pr, pi};
    }
  }

  static void apply(double& w, double& step, double& previous, double g, const RpropParams& p) {
    const double agreement = g * previous;
    if (agreement > 0.0) {
      step = std::min(step * p.eta_plus, p.delta_max);
    } else if (agreement < 0.0) {
      step = std::max(step * p.eta_minus, p.delta_min);
      g = 0.0;
    }
    if (g > 0.0) w -= step;
    else if (g < 0.0) w += step;
    previous = g;
  }
};

struct SubnetTrainer {
  SubNetwork* net;
  Eigen::MatrixXcd x;
  Eigen::MatrixXcd target;
  RpropBlock w_in, b_in, w_out, b_out;
  SubGradient grad;

  SubnetTrainer(SubNetwork& s, Eigen::MatrixXcd x_in, Eigen::MatrixXcd t_in, double initial)
      : net(&s),
        x(std::move(x_in)),
        target(std::move(t_in)),
        w_in(s.w_in.rows(), s.w_in.cols(), initial),
        b_in(s.b_in.size(), 1, initial),
        w_out(s.w_out.rows(), s.w_out.cols(), initial),
        b_out(s.b_out.size(), 1, initial) {}

  double evaluate() { return subnet_cost(*net, x, target, &grad); }

  void step(const RpropParams& p) {
    w_in.update(net->w_in, grad.w_in, p);
    b_in.update(net->b_in, grad.b_in, p);
    w_out.update(net->w_out, grad.w_out, p);
    b_out.update(net->b_out, grad.b_out, p);
  }
};

}  // namespace

TrainingResult train_rprop(GroupedNetwork net, const SymbolGrid& tx_training, const SymbolGrid& rx_training,
                           const TrainingConfig& cfg) {
  cfg.validate();
  check_training_shapes(net, rx_training, tx_training);
  const double initial = cfg.learning_rate * cfg.rprop.delta0;
  std::vector<SubnetTrainer> trainers;
  trainers.reserve(net.subnets().size());
  for (auto& s : net.subnets()) {
    trainers.emplace_back(s, group_inputs(rx_training, s.first, s.inputs()),
                          group_inputs(tx_training, s.first, s.inputs()), initial);
  }

  TrainingRecord record;
  for (std::size_t epoch = 0;; ++epoch) {
    double cost = 0.0;
    for (auto& tr : trainers) cost += tr.evaluate();
    record.cost_per_epoch.push_back(cost);
    if (!std::isfinite(cost)) {
      throw TrainingDiverged("train_rprop: non-finite cost at epoch " + std::to_string(epoch) +
                             " (last finite cost " +
                             (epoch > 0 ? std::to_string(record.cost_per_epoch[epoch - 1]) : std::string("n/a")) + ")");
    }
    if (cost <= cfg.stop_threshold) {
      record.converged = true;
      break;
    }
    if (cfg.plateau_window > 0 && epoch >= cfg.plateau_window &&
        std::abs(record.cost_per_epoch[epoch - cfg.plateau_window] - cost) < cfg.plateau_tolerance) {
      record.converged = true;
      break;
    }
    if (epoch == cfg.max_epochs) break;
    for (auto& tr : trainers) tr.step(cfg.rprop);
    ++record.epochs_run;
  }
  if (!net.all_finite()) throw TrainingDiverged("train_rprop: non-finite weights after training");
  return {std::move(net), std::move(record)};
}

SymbolGrid equalize_grouped(const GroupedNetwork& net, const SymbolGrid& rx) {
  if (net.subnets().empty()) throw std::invalid_argument("equalize_grouped: network has no groups");
  if (!net.all_finite()) throw std::invalid_argument("equalize_grouped: network has non-finite weights");
  return net.forward(rx);
}

TrainingResult ann_per_subcarrier_train(const SymbolGrid& tx_training, const SymbolGrid& rx_training,
                                        std::size_t order, const TrainingConfig& cfg) {
  auto net = build_network(GroupPlan::per_subcarrier(tx_training.cols()), order, cfg.seed);
  return train_rprop(std::move(net), tx_training, rx_training, cfg);
}

SymbolGrid ann_per_subcarrier_equalize(const GroupedNetwork& net, const SymbolGrid& rx) {
  if (net.plan().case_id != GroupCase::PerSubcarrier) {
    throw std::invalid_argument("ann_per_subcarrier_equalize: network is not a per-subcarrier ANN");
  }
  return equalize_grouped(net, rx);
}

// ---------------------------------------------------------------- serialization

namespace {
constexpr char kNetworkMagic[4] = {'C', 'L', 'N', 'W'};
constexpr std::uint32_t kNetworkVersion = 1;
}  // namespace

std::vector<std::uint8_t> serialize_network(const GroupedNetwork& net) {
  detail::ByteWriter w;
  w.bytes(kNetworkMagic, 4);
  w.u32(kNetworkVersion);
  w.u32(static_cast<std::uint32_t>(net.plan().case_id));
  w.u32(static_cast<std::uint32_t>(net.constellation_order()));
  w.u64(net.seed());
  w.u32(static_cast<std::uint32_t>(net.plan().groups.size()));
  for (std::size_t i = 0; i < net.plan().groups.size(); ++i) {
    const auto& g = net.plan().groups[i];
    w.u32(static_cast<std::uint32_t>(g.first));
    w.u32(static_cast<std::uint32_t>(g.size));
    w.u32(static_cast<std::uint32_t>(g.role));
    w.u32(static_cast<std::uint32_t>(net.subnets()[i].hidden()));
  }
  const auto params = net.parameters();
  w.u64(params.size());
  for (const auto& v : params) {
    w.f64(v.real());
    w.f64(v.imag());
  }
  return w.take();
}

GroupedNetwork deserialize_network(std::span<const std::uint8_t> blob) {
  detail::ByteReader r(blob, "network blob");
  char magic[4];
  r.bytes(magic, 4);
  if (!std::equal(magic, magic + 4, kNetworkMagic)) throw FormatError("network blob: bad magic");
  const auto version = r.u32();
  if (version != kNetworkVersion) throw FormatError("network blob: unsupported version " + std::to_string(version));
  GroupPlan plan;
  plan.case_id = static_cast<GroupCase>(r.u32());
  const auto order = r.u32();
  const auto seed = r.u64();
  const auto n_groups = r.u32();
  std::vector<SubNetwork> subnets;
  for (std::uint32_t i = 0; i < n_groups; ++i) {
    SubcarrierGroup g;
    g.first = r.u32();
    g.size = r.u32();
    g.role = static_cast<GroupRole>(r.u32());
    const auto hidden = static_cast<Eigen::Index>(r.u32());
    const auto n = static_cast<Eigen::Index>(g.size);
    SubNetwork s;
    s.first = g.first;
    s.w_in.resize(hidden, n);
    s.b_in.resize(hidden);
    s.w_out.resize(n, hidden);
    s.b_out.resize(n);
    plan.groups.push_back(g);
    subnets.push_back(std::move(s));
  }
  try {
    plan.validate(plan.n_subcarriers());
  } catch (const std::exception& e) {
    throw FormatError(std::string("network blob: inconsistent group table: ") + e.what());
  }
  GroupedNetwork net(plan, order, seed, std::move(subnets));
  const auto count = r.u64();
  if (count != net.n_parameters()) throw FormatError("network blob: parameter count does not match the group table");
  r.need(static_cast<std::size_t>(count) * 16);
  std::vector<Complex> values(count);
  for (auto& v : values) {
    const double re = r.f64();
    const double im = r.f64();
    v = {re, im};
  }
  net.set_parameters(values);
  return net;
}

void save_network(const GroupedNetwork& net, const std::filesystem::path& path) {
  detail::write_file(path.string(), serialize_network(net));
}

GroupedNetwork load_network(const std::filesystem::path& path) {
  return deserialize_network(detail::read_file(path.string()));
}

}  // namespace cooflab
