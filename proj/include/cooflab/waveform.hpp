#ifndef COOFLAB_WAVEFORM_HPP
#define COOFLAB_WAVEFORM_HPP

#include <vector>

#include "cooflab/types.hpp"

namespace cooflab {

namespace phys {
inline constexpr double kSpeedOfLight = 299792458.0;   // m/s
inline constexpr double kPlanck = 6.62607015e-34;      // J s
inline constexpr double kPi = 3.14159265358979323846;
}  // namespace phys

/// Uniformly sampled complex baseband field; |sample|^2 is power in watts.
struct SampledWaveform {
  std::vector<Complex> samples;
  double sample_rate = 0.0;         // Hz
  double center_freq_offset = 0.0;  // Hz, relative to the optical reference

  std::size_t size() const { return samples.size(); }
  double mean_power() const;
  double energy() const;

  friend bool operator==(const SampledWaveform&, const SampledWaveform&) = default;
};

/// Standard single-mode fiber constants in the customary engineering units.
struct FiberParams {
  double gamma = 1.1;                  // 1/(W km)
  double dispersion_D = 16.0;          // ps/(nm km)
  double dispersion_slope_S = 0.06;    // ps/(nm^2 km)
  double loss_alpha = 0.2;             // dB/km
  double pmd_coeff = 0.1;              // ps/sqrt(km); stored only
  double center_wavelength = 1550.2;   // nm

  /// beta2 in s^2/m.
  double beta2() const;
  /// beta3 in s^3/m.
  double beta3() const;
  /// Power attenuation coefficient in 1/m.
  double alpha_per_m() const;
  /// gamma in 1/(W m).
  double gamma_per_w_m() const { return gamma * 1e-3; }
  double optical_frequency() const { return phys::kSpeedOfLight / (center_wavelength * 1e-9); }

  void validate() const;
};

/// Largest relative deviation max|a-b| / max|b|.
double relative_error(const std::vector<Complex>& a, const std::vector<Complex>& b);

/// Band-limited resampling by zero-padding (up) or truncating (down) the
/// spectrum. down(up(x, k), k) == x to rounding for any length.
SampledWaveform upsample(const SampledWaveform& w, std::size_t factor);
SampledWaveform downsample(const SampledWaveform& w, std::size_t factor);

}  // namespace cooflab

#endif  // COOFLAB_WAVEFORM_HPP
