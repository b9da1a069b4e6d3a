#include "cooflab/fiber.hpp"

#include <atomic>
#include <cmath>
#include <iostream>
#include <string>

#include "cooflab/fft.hpp"

namespace cooflab {

namespace {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

std::vector<Complex> linear_operator(std::size_t n, double fs, double f0, const FiberParams& p, double length_m,
                                     double sign) {
  const double b2 = p.beta2();
  const double b3 = p.beta3();
  const double alpha = p.alpha_per_m();
  const double inv_n = 1.0 / static_cast<double>(n);
  const double amplitude = inv_n * std::exp(-sign * alpha / 2.0 * length_m);
  std::vector<Complex> h(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double omega = 2.0 * phys::kPi * (bin_frequency(k, n, fs) + f0);
    const double phase = sign * (b2 / 2.0 * omega * omega - b3 / 6.0 * omega * omega * omega) * length_m;
    h[k] = std::polar(amplitude, phase);
  }
  return h;
}

// Element-wise complex product.
void multiply(std::span<Complex> a, const std::vector<Complex>& b) {
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double ar = a[k].real(), ai = a[k].imag();
    const double br = b[k].real(), bi = b[k].imag();
    a[k] = {ar * br - ai * bi, ar * bi + ai * br};
  }
}

// Warns once per process when more than 0.1 % of the power sits in the
// outer half of the simulated band.
void check_oversampling(std::span<const Complex> spectrum) {
  static std::atomic<bool> warned{false};
  if (warned.load()) return;
  const std::size_t n = spectrum.size();
  double total = 0.0;
  double outer = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double e = std::norm(spectrum[k]);
    total += e;
    const std::size_t dist = std::min(k, n - k);
    if (4 * dist > n) outer += e;
  }
  if (total > 0.0 && outer > 1e-3 * total && !warned.exchange(true)) {
    std::clog << "warning: ssfm_propagate: " << 100.0 * outer / total
              << "% of the signal power lies above fs/4; the waveform is undersampled for nonlinear propagation\n";
  }
}

SampledWaveform ssfm_run(const SampledWaveform& w, const FiberParams& p, double length_km, double step_km,
                         Direction direction, bool check);

}  // namespace

void LinkPlan::validate() const {
  if (!(span_length_km > 0.0)) throw ConfigError("link.span_length_km", "must be > 0");
  if (!(step_km > 0.0)) throw ConfigError("link.step_km", "must be > 0");
  if (n_spans > 0 && step_km > span_length_km) throw ConfigError("link.step_km", "larger than the span length");
  if (amplifier.gain_db && *amplifier.gain_db < 0.0) throw ConfigError("link.amplifier.gain_db", "must be >= 0");
  if (!std::isfinite(launch_power_dbm)) throw ConfigError("link.launch_power_dbm", "must be finite");
  if (!(amplifier.noise_figure_db >= 0.0)) throw ConfigError("link.amplifier.noise_figure_db", "must be >= 0");
}

SampledWaveform ssfm_propagate(const SampledWaveform& w, const FiberParams& p, double length_km, double step_km,
                               Direction direction) {
  return ssfm_run(w, p, length_km, step_km, direction, direction == Direction::Forward);
}

namespace {

SampledWaveform ssfm_run(const SampledWaveform& w, const FiberParams& p, double length_km, double step_km,
                         Direction direction, bool check) {
  if (!(step_km > 0.0)) throw std::invalid_argument("ssfm_propagate: step must be > 0");
  if (!(length_km >= 0.0)) throw std::invalid_argument("ssfm_propagate: length must be >= 0");
  if (length_km == 0.0 || w.samples.empty()) return w;
  if (step_km > length_km * (1.0 + 1e-12)) {
    throw std::invalid_argument("ssfm_propagate: step " + std::to_string(step_km) + " km exceeds length " +
                                std::to_string(length_km) + " km");
  }
  const double sign = direction == Direction::Forward ? 1.0 : -1.0;
  const double length_m = length_km * 1e3;
  const std::size_t n = w.size();
  const double fs = w.sample_rate;
  const double f0 = w.center_freq_offset;

  FftWorkspace ws(n);
  auto buf = ws.data();
  std::copy(w.samples.begin(), w.samples.end(), buf.begin());

  if (p.gamma == 0.0) {
    const auto h = linear_operator(n, fs, f0, p, length_m, sign);
    ws.forward();
    multiply(buf, h);
    ws.inverse();
    SampledWaveform out = w;
    std::copy(buf.begin(), buf.end(), out.samples.begin());
    return out;
  }

  const auto n_steps = static_cast<std::size_t>(std::ceil(length_km / step_km - 1e-9));
  const double h_m = length_m / static_cast<double>(n_steps);
  const auto half = linear_operator(n, fs, f0, p, h_m / 2.0, sign);
  const auto full = linear_operator(n, fs, f0, p, h_m, sign);
  const double alpha = p.alpha_per_m();
  // nonlinear phase integrated over the step around its midpoint
  const double l_eff = alpha > 0.0 ? 2.0 / alpha * std::sinh(alpha * h_m / 2.0) : h_m;
  const double nl = sign * p.gamma_per_w_m() * l_eff;

  ws.forward();
  if (check) check_oversampling(buf);
  multiply(buf, half);
  ws.inverse();
  for (std::size_t s = 0; s < n_steps; ++s) {
    for (auto& a : buf) {
      const double re = a.real();
      const double im = a.imag();
      const double phi = nl * (re * re + im * im);
      const double c = std::cos(phi);
      const double sn = std::sin(phi);
      a = {re * c - im * sn, re * sn + im * c};
    }
    ws.forward();
    multiply(buf, (s + 1 == n_steps) ? half : full);
    ws.inverse();
  }
  SampledWaveform out = w;
  std::copy(buf.begin(), buf.end(), out.samples.begin());
  return out;
}

}  // namespace

double ase_psd(double gain_db, double noise_figure_db, double optical_freq_hz) {
  const double g = db_to_linear(gain_db);
  const double nf = db_to_linear(noise_figure_db);
  return nf / 2.0 * (g - 1.0) * phys::kPlanck * optical_freq_hz;
}

SampledWaveform edfa_amplify(const SampledWaveform& w, double gain_db, double noise_figure_db,
                             double optical_freq_hz, Rng& rng) {
  if (!(gain_db >= 0.0)) throw std::invalid_argument("edfa_amplify: gain must be >= 0 dB");
  const double field_gain = std::sqrt(db_to_linear(gain_db));
  const double variance = ase_psd(gain_db, noise_figure_db, optical_freq_hz) * w.sample_rate;
  SampledWaveform out = w;
  for (auto& a : out.samples) a *= field_gain;
  if (variance > 0.0) {
    for (auto& a : out.samples) a += rng.complex_normal(variance);
  }
  return out;
}

SampledWaveform edfa_amplify(const SampledWaveform& w, const AmplifierParams& a, double span_loss_db,
                             double default_freq_hz, Rng& rng) {
  return edfa_amplify(w, a.resolved_gain_db(span_loss_db), a.noise_figure_db,
                      a.optical_freq.value_or(default_freq_hz), rng);
}

SampledWaveform propagate_link(const SampledWaveform& w, const LinkPlan& plan, const FiberParams& p, bool nl_on,
                               bool noise_on, Rng& rng) {
  plan.validate();
  p.validate();
  SampledWaveform cur = w;
  const double target_w = 1e-3 * db_to_linear(plan.launch_power_dbm);
  const double mp = cur.mean_power();
  if (mp > 0.0) {
    const double s = std::sqrt(target_w / mp);
    for (auto& a : cur.samples) a *= s;
  }
  FiberParams fiber = p;
  if (!nl_on) fiber.gamma = 0.0;
  const double span_loss_db = p.loss_alpha * plan.span_length_km;
  const double gain_db = plan.amplifier.resolved_gain_db(span_loss_db);
  const double nu = plan.amplifier.optical_freq.value_or(p.optical_frequency());
  for (std::size_t s = 0; s < plan.n_spans; ++s) {
    // only the launch spectrum is checked; ASE fills the whole band afterwards
    cur = ssfm_run(cur, fiber, plan.span_length_km, plan.step_km, Direction::Forward, s == 0);
    if (noise_on) {
      cur = edfa_amplify(cur, gain_db, plan.amplifier.noise_figure_db, nu, rng);
    } else {
      const double g = std::sqrt(db_to_linear(gain_db));
      for (auto& a : cur.samples) a *= g;
    }
  }
  return cur;
}

SampledWaveform dac_adc(const SampledWaveform& w, const ConverterParams& c) {
  if (c.bits < 1 || c.bits > 52) throw std::invalid_argument("dac_adc: bits must be in [1, 52]");
  const double rms = std::sqrt(w.mean_power() / 2.0);
  if (rms == 0.0) return w;
  const double a_clip = rms * std::pow(10.0, c.clipping_ratio_db / 20.0);
  const double levels = std::ldexp(1.0, static_cast<int>(c.bits));
  const double last = levels - 1.0;
  const double step = 2.0 * a_clip / last;
  auto quantize = [&](double v) {
    const double clipped = std::clamp(v, -a_clip, a_clip);
    const double j = std::clamp(std::round((clipped + a_clip) / step), 0.0, last);
    return a_clip * ((2.0 * j - last) / last);
  };
  SampledWaveform out = w;
  for (auto& a : out.samples) a = {quantize(a.real()), quantize(a.imag())};
  return out;
}

SampledWaveform frequency_shift(const SampledWaveform& w, double shift_hz) {
  SampledWaveform out = w;
  if (shift_hz == 0.0) return out;
  const double cycles_per_sample = shift_hz / w.sample_rate;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double frac = std::fmod(cycles_per_sample * static_cast<double>(i), 1.0);
    out.samples[i] *= std::polar(1.0, 2.0 * phys::kPi * frac);
  }
  return out;
}

SampledWaveform wdm_mux(const std::vector<std::pair<SampledWaveform, double>>& channels) {
  if (channels.empty()) throw std::invalid_argument("wdm_mux: no channels");
  const auto& first = channels.front().first;
  SampledWaveform out;
  out.sample_rate = first.sample_rate;
  out.center_freq_offset = first.center_freq_offset;
  out.samples.assign(first.size(), Complex{});
  for (const auto& [ch, offset] : channels) {
    if (ch.size() != first.size() || ch.sample_rate != first.sample_rate) {
      throw std::invalid_argument("wdm_mux: channels must share sample rate and length");
    }
    if (std::abs(offset) >= ch.sample_rate / 2.0) {
      throw std::invalid_argument("wdm_mux: offset " + std::to_string(offset) + " Hz aliases at fs = " +
                                  std::to_string(ch.sample_rate) + " Hz");
    }
    const auto shifted = frequency_shift(ch, offset);
    for (std::size_t i = 0; i < out.size(); ++i) out.samples[i] += shifted.samples[i];
  }
  return out;
}

SampledWaveform wdm_demux(const SampledWaveform& aggregate, double offset_hz, double bandwidth_hz) {
  if (!(bandwidth_hz > 0.0)) throw std::invalid_argument("wdm_demux: bandwidth must be > 0");
  if (std::abs(offset_hz) + bandwidth_hz / 2.0 > aggregate.sample_rate / 2.0) {
    throw std::invalid_argument("wdm_demux: offset + bandwidth/2 exceeds Nyquist (aliasing)");
  }
  auto shifted = frequency_shift(aggregate, -offset_hz);
  const std::size_t n = shifted.size();
  FftWorkspace ws(n);
  auto buf = ws.data();
  std::copy(shifted.samples.begin(), shifted.samples.end(), buf.begin());
  ws.forward();
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double f = bin_frequency(k, n, shifted.sample_rate);
    buf[k] = std::abs(f) <= bandwidth_hz / 2.0 ? buf[k] * inv_n : Complex{};
  }
  ws.inverse();
  std::copy(buf.begin(), buf.end(), shifted.samples.begin());
  shifted.center_freq_offset = aggregate.center_freq_offset + offset_hz;
  return shifted;
}

SampledWaveform apply_phase_noise(const SampledWaveform& w, double linewidth_hz, Rng& rng) {
  if (!(linewidth_hz >= 0.0)) throw std::invalid_argument("apply_phase_noise: linewidth must be >= 0");
  if (linewidth_hz == 0.0) return w;
  const double sigma = std::sqrt(2.0 * phys::kPi * linewidth_hz / w.sample_rate);
  SampledWaveform out = w;
  double theta = 0.0;
  for (auto& a : out.samples) {
    theta += sigma * rng.normal();
    a *= std::polar(1.0, theta);
  }
  return out;
}

}  // namespace cooflab
