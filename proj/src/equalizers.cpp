#include "cooflab/equalizers.hpp"

#include <cmath>

namespace cooflab {

SymbolGrid linear_equalize(const SymbolGrid& rx, const ChannelEstimate& est) {
  if (rx.cols() != est.taps.size()) throw std::invalid_argument("linear_equalize: tap count does not match columns");
  if (rx.rows() != est.cpe_per_symbol.size()) {
    throw std::invalid_argument("linear_equalize: common-phase vector does not match rows");
  }
  for (const auto& t : est.taps) {
    if (t == Complex{}) throw std::invalid_argument("linear_equalize: zero channel tap");
  }
  SymbolGrid out(rx.rows(), rx.cols());
  for (std::size_t r = 0; r < rx.rows(); ++r) {
    const Complex derotate = std::polar(1.0, -est.cpe_per_symbol[r]);
    for (std::size_t c = 0; c < rx.cols(); ++c) out(r, c) = rx(r, c) / est.taps[c] * derotate;
  }
  return out;
}

SampledWaveform dbp_equalize(const SampledWaveform& w, const FiberParams& p, const LinkPlan& plan,
                             std::size_t steps_per_span) {
  if (steps_per_span < 1) throw std::invalid_argument("dbp_equalize: steps_per_span must be >= 1");
  plan.validate();
  const double gain_db = plan.amplifier.resolved_gain_db(p.loss_alpha * plan.span_length_km);
  const double inv_gain = 1.0 / std::sqrt(std::pow(10.0, gain_db / 10.0));
  const double step_km = plan.span_length_km / static_cast<double>(steps_per_span);
  SampledWaveform cur = w;
  for (std::size_t s = 0; s < plan.n_spans; ++s) {
    for (auto& a : cur.samples) a *= inv_gain;
    cur = ssfm_propagate(cur, p, plan.span_length_km, step_km, Direction::Backward);
  }
  return cur;
}

}  // namespace cooflab
