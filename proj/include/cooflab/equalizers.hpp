#ifndef COOFLAB_EQUALIZERS_HPP
#define COOFLAB_EQUALIZERS_HPP

#include "cooflab/fiber.hpp"
#include "cooflab/ofdm.hpp"

namespace cooflab {

/// out[t][k] = rx[t][k] / taps[k] * exp(-i cpe[t]).
SymbolGrid linear_equalize(const SymbolGrid& rx, const ChannelEstimate& est);

/// Digital back-propagation: for each span in reverse order remove the
/// amplifier gain, then propagate backward in steps_per_span equal steps.
SampledWaveform dbp_equalize(const SampledWaveform& w, const FiberParams& p, const LinkPlan& plan,
                             std::size_t steps_per_span = 40);

}  // namespace cooflab

#endif  // COOFLAB_EQUALIZERS_HPP
