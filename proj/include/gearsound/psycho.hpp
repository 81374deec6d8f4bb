#pragma once

#include <vector>

#include "gearsound/errors.hpp"
#include "gearsound/feature_vector.hpp"
#include "gearsound/time_signal.hpp"

namespace gearsound {

// Loudness sampled every 2 ms, in sone.
struct LoudnessSeries {
  std::vector<double> values;
  double frame_period_s = 0.002;
  double start_time_s = 0.0;
};

// Roughness per non-overlapping 200 ms frame, in asper.
struct RoughnessSeries {
  std::vector<double> values;
  double frame_period_s = 0.2;
};

// Fluctuation strength at the loudness time resolution, in vacil.
struct FluctuationSeries {
  std::vector<double> values;
  double frame_period_s = 0.002;
};

struct StationaryLoudness {
  double total_sone = 0.0;
  std::vector<double> specific;  // sone per 0.1 Bark, 240 channels over 0..24
};

// Critical-band model over the whole record: third-octave band levels ->
// Bark-domain excitation with level-dependent upward masking slopes ->
// compressive specific loudness (exponent 0.23) -> integral over 24 Bark.
// Anchored so a 1 kHz tone at 40 dB SPL is 1 sone. Requires >= 0.5 s.
StationaryLoudness stationary_loudness(const TimeSignal& signal);

// Same model on short windows hopped every 2 ms. Frame count is exactly
// floor(duration / 0.002). Requires >= 0.1 s.
LoudnessSeries timevarying_loudness(const TimeSignal& signal);

// Modulation-based roughness on non-overlapping 200 ms frames: overlapping
// critical-band channels, per-channel envelopes, modulation weighting
// peaking near 70 Hz, cross-band envelope correlation, squared summation.
// Anchored so a 1 kHz, 60 dB tone fully modulated at 70 Hz is 1 asper.
// Requires >= 0.4 s.
RoughnessSeries timevarying_roughness(const TimeSignal& signal);

// Loudness-modulation analysis with weighting peaking at 4 Hz, emitted at
// the loudness resolution. Anchored so a 1 kHz, 60 dB tone fully modulated
// at 4 Hz is 1 vacil. Requires >= 1.0 s.
FluctuationSeries timevarying_fluctuation(const TimeSignal& signal);
FluctuationSeries timevarying_fluctuation(const LoudnessSeries& loudness);

// 10 Hz zero-phase high-pass (7.5-period FIR at the 500 Hz frame rate)
// with the input mean restored afterwards, so max/mean ratios downstream
// stay well-defined. Requires length > 1125.
LoudnessSeries highpass_loudness(const LoudnessSeries& series);

// max / mean. Mean must be positive.
double impulse_factor(const std::vector<double>& values);

// Population variance (divide by N). Requires >= 2 values.
double variance(const std::vector<double>& values);

// Standardized fourth central moment, non-excess (Gaussian -> 3).
// Requires >= 4 values and non-degenerate variance.
double kurtosis(const std::vector<double>& values);

// [stationary loudness, mean roughness, mean fluctuation].
FeatureVector spa_features(const TimeSignal& signal);

// [impulse factor of the high-passed loudness series, variance of the
// roughness series, kurtosis of the fluctuation series].
FeatureVector tvpa_features(const TimeSignal& signal);

}  // namespace gearsound
