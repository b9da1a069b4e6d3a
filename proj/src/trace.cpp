#include "cooflab/trace.hpp"

#include <algorithm>
#include <cmath>

#include "binary_io.hpp"

namespace cooflab {

namespace {
constexpr char kTraceMagic[4] = {'C', 'L', 'T', 'R'};
constexpr std::uint32_t kTraceVersion = 1;
}  // namespace

std::vector<std::uint8_t> encode_trace(const SampledWaveform& w) {
  if (!(w.sample_rate > 0.0)) throw std::invalid_argument("save_trace: sample rate must be > 0");
  detail::ByteWriter out;
  out.bytes(kTraceMagic, 4);
  out.u32(kTraceVersion);
  out.f64(w.sample_rate);
  out.f64(w.center_freq_offset);
  out.u64(w.size());
  for (const auto& a : w.samples) {
    out.f64(a.real());
    out.f64(a.imag());
  }
  return out.take();
}

SampledWaveform decode_trace(std::span<const std::uint8_t> bytes) {
  detail::ByteReader in(bytes, "trace");
  char magic[4];
  in.bytes(magic, 4);
  if (!std::equal(magic, magic + 4, kTraceMagic)) throw FormatError("trace: bad magic (not a waveform trace)");
  const auto version = in.u32();
  if (version != kTraceVersion) {
    throw FormatError("trace: unsupported version " + std::to_string(version) + " (expected " +
                      std::to_string(kTraceVersion) + ")");
  }
  SampledWaveform w;
  w.sample_rate = in.f64();
  w.center_freq_offset = in.f64();
  if (!(w.sample_rate > 0.0) || !std::isfinite(w.sample_rate)) throw FormatError("trace: invalid sample rate");
  const auto n = in.u64();
  if (n > in.remaining() / 16) {
    throw FormatError("trace: truncated (header announces " + std::to_string(n) + " samples, payload holds " +
                      std::to_string(in.remaining() / 16) + ")");
  }
  w.samples.resize(n);
  for (auto& a : w.samples) {
    const double re = in.f64();
    const double im = in.f64();
    a = {re, im};
  }
  if (in.remaining() != 0) throw FormatError("trace: " + std::to_string(in.remaining()) + " trailing bytes");
  return w;
}

void save_trace(const SampledWaveform& w, const std::filesystem::path& path) {
  detail::write_file(path.string(), encode_trace(w));
}

SampledWaveform load_trace(const std::filesystem::path& path) { return decode_trace(detail::read_file(path.string())); }

}  // namespace cooflab
