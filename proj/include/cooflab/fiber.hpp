#ifndef COOFLAB_FIBER_HPP
#define COOFLAB_FIBER_HPP

#include <optional>
#include <utility>
#include <vector>

#include "cooflab/random.hpp"
#include "cooflab/waveform.hpp"

namespace cooflab {

struct AmplifierParams {
  std::optional<double> gain_db;  // empty: compensate the span loss
  double noise_figure_db = 5.5;
  std::optional<double> optical_freq;  // Hz; empty: from the fiber wavelength

  /// Gain in dB for a span of the given loss.
  double resolved_gain_db(double span_loss_db) const { return gain_db.value_or(span_loss_db); }
};

struct LinkPlan {
  std::size_t n_spans = 20;
  double span_length_km = 100.0;
  AmplifierParams amplifier;
  double launch_power_dbm = 0.0;  // total power at the fiber input
  double step_km = 0.1;           // forward split-step resolution

  void validate() const;
};

struct ConverterParams {
  unsigned bits = 10;
  double clipping_ratio_db = 13.0;
};

enum class Direction { Forward, Backward };

/// Symmetric split-step Fourier solution of the scalar NLSE over length_km
/// in equal steps of at most step_km. Backward negates gamma, beta2, beta3
/// and turns loss into gain so that it undoes a matched forward run.
/// With gamma == 0 the whole length is applied as one linear step. Forward
/// runs warn once per process when the input spectrum is undersampled.
SampledWaveform ssfm_propagate(const SampledWaveform& w, const FiberParams& p, double length_km,
                               double step_km, Direction direction = Direction::Forward);

/// One-sided single-polarization ASE PSD (W/Hz): nsp (G-1) h nu with nsp = NF/2.
double ase_psd(double gain_db, double noise_figure_db, double optical_freq_hz);

/// Field gain sqrt(G) plus circular Gaussian ASE of variance S_ASE * fs.
SampledWaveform edfa_amplify(const SampledWaveform& w, double gain_db, double noise_figure_db,
                             double optical_freq_hz, Rng& rng);
SampledWaveform edfa_amplify(const SampledWaveform& w, const AmplifierParams& a, double span_loss_db,
                             double default_freq_hz, Rng& rng);

/// Scales to the launch power then runs span + amplifier per span.
SampledWaveform propagate_link(const SampledWaveform& w, const LinkPlan& plan, const FiberParams& p,
                               bool nl_on, bool noise_on, Rng& rng);

/// Independent I/Q clipping at 10^(CR/20) times the per-quadrature rms, then
/// a 2^bits-level mid-rise quantizer whose outer levels sit at +-A_clip.
SampledWaveform dac_adc(const SampledWaveform& w, const ConverterParams& c);

/// Sum of frequency-shifted channels (equal rate and length required).
SampledWaveform wdm_mux(const std::vector<std::pair<SampledWaveform, double>>& channels);
/// Shift to baseband and keep |f| <= bandwidth/2.
SampledWaveform wdm_demux(const SampledWaveform& aggregate, double offset_hz, double bandwidth_hz);

/// Wiener phase noise with increment variance 2 pi linewidth / fs.
SampledWaveform apply_phase_noise(const SampledWaveform& w, double linewidth_hz, Rng& rng);

/// Multiplies by exp(i 2 pi f n / fs).
SampledWaveform frequency_shift(const SampledWaveform& w, double shift_hz);

}  // namespace cooflab

#endif  // COOFLAB_FIBER_HPP
