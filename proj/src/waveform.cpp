#include "cooflab/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cooflab/fft.hpp"

namespace cooflab {

double SampledWaveform::energy() const {
  return std::accumulate(samples.begin(), samples.end(), 0.0,
                         [](double acc, const Complex& z) { return acc + std::norm(z); });
}

double SampledWaveform::mean_power() const {
  return samples.empty() ? 0.0 : energy() / static_cast<double>(samples.size());
}

double FiberParams::beta2() const {
  const double lambda = center_wavelength * 1e-9;
  const double d = dispersion_D * 1e-6;  // ps/(nm km) -> s/m^2
  return -d * lambda * lambda / (2.0 * phys::kPi * phys::kSpeedOfLight);
}

double FiberParams::beta3() const {
  const double lambda = center_wavelength * 1e-9;
  const double d = dispersion_D * 1e-6;
  const double s = dispersion_slope_S * 1e3;  // ps/(nm^2 km) -> s/m^3
  const double k = lambda / (2.0 * phys::kPi * phys::kSpeedOfLight);
  return k * k * (lambda * lambda * s + 2.0 * lambda * d);
}

double FiberParams::alpha_per_m() const { return loss_alpha * std::log(10.0) / 10.0 * 1e-3; }

void FiberParams::validate() const {
  if (!(gamma >= 0.0)) throw ConfigError("fiber.gamma", "must be >= 0");
  if (!(loss_alpha >= 0.0)) throw ConfigError("fiber.loss_alpha", "must be >= 0");
  if (!(center_wavelength > 0.0)) throw ConfigError("fiber.center_wavelength", "must be > 0");
  if (!std::isfinite(dispersion_D)) throw ConfigError("fiber.dispersion_D", "must be finite");
  if (!std::isfinite(dispersion_slope_S)) throw ConfigError("fiber.dispersion_slope_S", "must be finite");
}

double relative_error(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("relative_error: length mismatch");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  return den > 0.0 ? num / den : num;
}

SampledWaveform upsample(const SampledWaveform& w, std::size_t factor) {
  if (factor == 0) throw std::invalid_argument("upsample: factor must be >= 1");
  if (factor == 1 || w.samples.empty()) {
    auto out = w;
    out.sample_rate *= static_cast<double>(factor == 0 ? 1 : factor);
    return out;
  }
  const std::size_t n = w.size();
  const std::size_t m = n * factor;
  const auto spec = fft(w.samples);
  FftWorkspace ws(m);
  auto y = ws.data();
  const std::size_t half = n / 2;
  const std::size_t pos = (n % 2 == 0) ? half : half + 1;  // bins [0, pos) are non-negative
  for (std::size_t k = 0; k < pos; ++k) y[k] = spec[k];
  for (std::size_t k = pos; k < n; ++k) y[k + m - n] = spec[k];
  if (n % 2 == 0) {
    // split the Nyquist bin between +fs/2 and -fs/2
    y[half] = 0.5 * spec[half];
    y[m - half] = 0.5 * spec[half];
  }
  ws.inverse();
  SampledWaveform out;
  out.samples.assign(y.begin(), y.end());
  const double scale = 1.0 / static_cast<double>(n);
  for (auto& v : out.samples) v *= scale;
  out.sample_rate = w.sample_rate * static_cast<double>(factor);
  out.center_freq_offset = w.center_freq_offset;
  return out;
}

SampledWaveform downsample(const SampledWaveform& w, std::size_t factor) {
  if (factor == 0) throw std::invalid_argument("downsample: factor must be >= 1");
  if (w.size() % factor != 0) throw std::invalid_argument("downsample: length not a multiple of the factor");
  if (factor == 1) return w;
  const std::size_t m = w.size();
  const std::size_t n = m / factor;
  const auto spec = fft(w.samples);
  FftWorkspace ws(n);
  auto x = ws.data();
  const std::size_t half = n / 2;
  const std::size_t pos = (n % 2 == 0) ? half : half + 1;
  for (std::size_t k = 0; k < pos; ++k) x[k] = spec[k];
  for (std::size_t k = pos; k < n; ++k) x[k] = spec[k + m - n];
  if (n % 2 == 0) x[half] = spec[half] + spec[m - half];
  ws.inverse();
  SampledWaveform out;
  out.samples.assign(x.begin(), x.end());
  const double scale = 1.0 / static_cast<double>(m);
  for (auto& v : out.samples) v *= scale;
  out.sample_rate = w.sample_rate / static_cast<double>(factor);
  out.center_freq_offset = w.center_freq_offset;
  return out;
}

}  // namespace cooflab
