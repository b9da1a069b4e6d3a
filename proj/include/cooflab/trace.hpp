#ifndef COOFLAB_TRACE_HPP
#define COOFLAB_TRACE_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "cooflab/waveform.hpp"

namespace cooflab {

/// Waveform trace: "CLTR", u32 version, f64 sample_rate, f64
/// center_freq_offset, u64 length, then length little-endian f64 (I, Q)
/// pairs.
std::vector<std::uint8_t> encode_trace(const SampledWaveform& w);
SampledWaveform decode_trace(std::span<const std::uint8_t> bytes);

void save_trace(const SampledWaveform& w, const std::filesystem::path& path);
SampledWaveform load_trace(const std::filesystem::path& path);

}  // namespace cooflab

#endif  // COOFLAB_TRACE_HPP
