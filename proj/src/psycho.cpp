#include "gearsound/psycho.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>

#include "gearsound/dsp.hpp"
#include "gearsound/fft.hpp"

namespace gearsound {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kPressureRef = 2e-5;  // pascal, 0 dB SPL

// Model anchors, fixed against the definitional reference stimuli:
// 1 kHz / 40 dB -> 1 sone, 1 kHz 60 dB fully 70 Hz-modulated -> 1 asper,
// the same carrier modulated at 4 Hz -> 1 vacil.
constexpr double kLoudnessCal = 0.78772;
constexpr double kRoughnessCal = 2.2321;
constexpr double kFluctuationCal = 1.3519;

constexpr int kChannels = 240;      // 0.1 Bark over 0..24
constexpr int kBandCount = 28;      // third-octave bands 25 Hz .. 12.5 kHz

const std::array<double, kBandCount>& band_centers() {
  static const std::array<double, kBandCount> centers = {
      25.0,   31.5,   40.0,   50.0,   63.0,   80.0,   100.0,  125.0,
      160.0,  200.0,  250.0,  315.0,  400.0,  500.0,  630.0,  800.0,
      1000.0, 1250.0, 1600.0, 2000.0, 2500.0, 3150.0, 4000.0, 5000.0,
      6300.0, 8000.0, 10000.0, 12500.0};
  return centers;
}

double bark(double f_hz) {
  const double k = f_hz / 7500.0;
  return 13.0 * std::atan(0.00076 * f_hz) + 3.5 * std::atan(k * k);
}

// Inverse of bark() by bisection; only used to precompute static tables.
double bark_inverse(double z) {
  double lo = 1.0, hi = 30000.0;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (bark(mid) < z ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Threshold in quiet (dB SPL) after Terhardt.
double threshold_quiet_db(double f_hz) {
  const double khz = f_hz / 1000.0;
  return 3.64 * std::pow(khz, -0.8) -
         6.5 * std::exp(-0.6 * (khz - 3.3) * (khz - 3.3)) +
         1e-3 * khz * khz * khz * khz;
}

struct LoudnessTables {
  std::array<double, kChannels> channel_bark;
  std::array<double, kChannels> threshold_db;
  std::array<double, kChannels> threshold_pow023;  // (E_thq/E_0)^0.23
  std::array<double, kBandCount> band_bark_lo;
  std::array<double, kBandCount> band_bark_hi;

  LoudnessTables() {
    for (int i = 0; i < kChannels; ++i) {
      channel_bark[i] = (static_cast<double>(i) + 0.5) * 0.1;
      const double f = bark_inverse(channel_bark[i]);
      threshold_db[i] = threshold_quiet_db(f);
      threshold_pow023[i] = std::pow(10.0, 0.023 * threshold_db[i]);
    }
    constexpr double kSixth = 1.1224620483093730;  // 2^(1/6)
    for (int b = 0; b < kBandCount; ++b) {
      band_bark_lo[b] = bark(band_centers()[b] / kSixth);
      band_bark_hi[b] = bark(band_centers()[b] * kSixth);
    }
  }
};

const LoudnessTables& tables() {
  static const LoudnessTables t;
  return t;
}

// Per (rate, fft size) map from spectrum bin to third-octave band (-1 when
// outside all bands). Shared across threads.
std::shared_ptr<const std::vector<std::int16_t>> band_map(double rate_hz,
                                                          std::size_t nfft) {
  static std::mutex mu;
  static std::map<std::pair<double, std::size_t>,
                  std::shared_ptr<const std::vector<std::int16_t>>>
      cache;
  const auto key = std::make_pair(rate_hz, nfft);
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  constexpr double kSixth = 1.1224620483093730;
  auto map = std::make_shared<std::vector<std::int16_t>>(nfft / 2 + 1, -1);
  for (std::size_t k = 1; k < map->size(); ++k) {
    const double f = static_cast<double>(k) * rate_hz / static_cast<double>(nfft);
    for (int b = 0; b < kBandCount; ++b) {
      if (f >= band_centers()[b] / kSixth && f < band_centers()[b] * kSixth) {
        (*map)[k] = static_cast<std::int16_t>(b);
        break;
      }
    }
  }
  cache[key] = map;
  return map;
}

// One-sided power spectrum of w-weighted samples; the powers sum to the
// mean square of the signal over the window (window loss compensated).
std::vector<double> windowed_powers(const double* x, std::size_t len,
                                    const std::vector<double>& window,
                                    std::size_t nfft) {
  std::vector<std::complex<double>> buf(nfft, {0.0, 0.0});
  double window_energy = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    const double w = window.empty() ? 1.0 : window[i];
    buf[i] = {x[i] * w, 0.0};
    window_energy += w * w;
  }
  fft::forward(buf);
  const std::size_t bins = nfft / 2 + 1;
  std::vector<double> powers(bins);
  const double norm = 1.0 / (static_cast<double>(nfft) * window_energy);
  for (std::size_t k = 0; k < bins; ++k) {
    const bool edge = (k == 0) || (nfft % 2 == 0 && k == nfft / 2);
    powers[k] = std::norm(buf[k]) * norm * (edge ? 1.0 : 2.0);
  }
  return powers;
}

std::array<double, kBandCount> third_octave_levels(
    const std::vector<double>& powers, const std::vector<std::int16_t>& map) {
  std::array<double, kBandCount> band_power{};
  for (std::size_t k = 1; k < powers.size() && k < map.size(); ++k) {
    if (map[k] >= 0) band_power[static_cast<std::size_t>(map[k])] += powers[k];
  }
  std::array<double, kBandCount> levels{};
  for (int b = 0; b < kBandCount; ++b) {
    levels[b] = band_power[b] > 0.0
                    ? 10.0 * std::log10(band_power[b] / (kPressureRef * kPressureRef))
                    : -400.0;
  }
  return levels;
}

// Bark-domain excitation (max over band contributions with -27 dB/Bark
// lower and level-dependent upper slopes) and Zwicker-style specific
// loudness integrated over the Bark axis.
double loudness_from_levels(const std::array<double, kBandCount>& levels,
                            std::vector<double>* specific_out) {
  const LoudnessTables& t = tables();
  std::array<double, kChannels> excitation;
  excitation.fill(-400.0);

  for (int b = 0; b < kBandCount; ++b) {
    const double level = levels[b];
    if (level < -50.0) continue;
    const double upper_slope =
        std::max(2.0, 24.0 + 230.0 / band_centers()[b] - 0.2 * level);
    const double z_lo = t.band_bark_lo[b];
    const double z_hi = t.band_bark_hi[b];
    for (int i = 0; i < kChannels; ++i) {
      const double z = t.channel_bark[i];
      double cand = level;
      if (z < z_lo) {
        cand -= 27.0 * (z_lo - z);
      } else if (z > z_hi) {
        cand -= upper_slope * (z - z_hi);
      }
      if (cand > excitation[i]) excitation[i] = cand;
    }
  }

  double total = 0.0;
  if (specific_out) specific_out->assign(kChannels, 0.0);
  for (int i = 0; i < kChannels; ++i) {
    const double over_db = excitation[i] - t.threshold_db[i];
    if (over_db <= 0.0) continue;
    const double e_ratio = std::pow(10.0, over_db / 10.0);
    double n = 0.08 * t.threshold_pow023[i] *
               (std::pow(0.5 + 0.5 * e_ratio, 0.23) - 1.0);
    if (n < 0.0) n = 0.0;
    n *= kLoudnessCal;
    if (specific_out) (*specific_out)[i] = n;
    total += 0.1 * n;
  }
  return total;
}

std::vector<double> hann(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(kTwoPi * static_cast<double>(i) /
                                static_cast<double>(n > 1 ? n - 1 : 1));
  }
  return w;
}

std::size_t exact_frame_count(std::size_t samples, double rate_hz,
                              double frames_per_second) {
  return static_cast<std::size_t>(std::floor(
      static_cast<double>(samples) * frames_per_second / rate_hz + 1e-9));
}

// Roughness modulation weighting: band-pass shaped, unity near 70 Hz.
double roughness_weight(double f_mod) {
  if (f_mod <= 0.0) return 0.0;
  const double resonance = 2.0 / (f_mod / 70.0 + 70.0 / f_mod);
  const double low_cut = f_mod * f_mod / (f_mod * f_mod + 15.0 * 15.0);
  return resonance * low_cut;
}

// Fluctuation weighting, unity at 4 Hz.
double fluctuation_weight(double f_mod) {
  if (f_mod <= 0.0) return 0.0;
  return 2.0 / (f_mod / 4.0 + 4.0 / f_mod);
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

StationaryLoudness stationary_loudness(const TimeSignal& signal) {
  if (signal.duration_s() < 0.5) {
    throw SignalTooShort("stationary loudness needs >= 0.5 s");
  }
  const std::size_t n = signal.size();
  const auto powers = windowed_powers(signal.samples.data(), n, {}, n);
  const auto map = band_map(signal.sample_rate_hz, n);
  const auto levels = third_octave_levels(powers, *map);
  StationaryLoudness out;
  out.total_sone = loudness_from_levels(levels, &out.specific);
  return out;
}

LoudnessSeries timevarying_loudness(const TimeSignal& signal) {
  if (signal.duration_s() < 0.1) {
    throw SignalTooShort("time-varying loudness needs >= 0.1 s");
  }
  const double fs = signal.sample_rate_hz;
  const std::size_t n = signal.size();
  const std::size_t frames = exact_frame_count(n, fs, 500.0);

  std::size_t win_len = static_cast<std::size_t>(std::llround(0.016 * fs));
  win_len = std::min(std::max<std::size_t>(win_len, 8), n);
  const std::size_t nfft = fft::next_pow2(win_len);
  const std::vector<double> window = hann(win_len);
  const auto map = band_map(fs, nfft);

  LoudnessSeries series;
  series.values.resize(frames);
  const double hop = fs / 500.0;
  for (std::size_t i = 0; i < frames; ++i) {
    const double center = (static_cast<double>(i) + 0.5) * hop;
    auto start = static_cast<std::ptrdiff_t>(std::llround(center)) -
                 static_cast<std::ptrdiff_t>(win_len / 2);
    start = std::clamp<std::ptrdiff_t>(start, 0,
                                       static_cast<std::ptrdiff_t>(n - win_len));
    const auto powers = windowed_powers(
        signal.samples.data() + start, win_len, window, nfft);
    const auto levels = third_octave_levels(powers, *map);
    series.values[i] = loudness_from_levels(levels, nullptr);
  }
  return series;
}

RoughnessSeries timevarying_roughness(const TimeSignal& signal) {
  if (signal.duration_s() < 0.4) {
    throw SignalTooShort("roughness needs >= 0.4 s");
  }
  const double fs = signal.sample_rate_hz;
  const std::size_t n = signal.size();
  const std::size_t frames = exact_frame_count(n, fs, 5.0);
  const auto frame_len =
      std::min(n, static_cast<std::size_t>(std::llround(0.2 * fs)));
  const std::size_t nfft = fft::next_pow2(frame_len);
  const std::vector<double> window = hann(frame_len);

  // Overlapping critical-band channels, 0.5 Bark spacing, wide enough that
  // the +/-1 Bark correlation partners of a narrowband sound still carry it.
  constexpr int kRoughChannels = 47;
  constexpr double kChannelHalfwidth = 1.25;
  constexpr std::size_t kEnvFft = 4096;
  const double env_rate = fs * static_cast<double>(kEnvFft) / static_cast<double>(nfft);
  const auto env_len =
      static_cast<std::size_t>(std::floor(0.2 * env_rate));

  // Bin -> Bark lookup for this (fs, nfft).
  std::vector<double> bin_bark(nfft / 2 + 1);
  for (std::size_t k = 0; k < bin_bark.size(); ++k) {
    bin_bark[k] = bark(static_cast<double>(k) * fs / static_cast<double>(nfft));
  }

  // Envelope-domain image of the analysis window over the central 80 % of
  // the frame (env sample i maps to time sample i * nfft / kEnvFft).
  const std::size_t stat_lo = (env_len + 9) / 10;
  const std::size_t stat_len = env_len - 2 * stat_lo;
  std::vector<double> env_window(stat_len);
  for (std::size_t i = 0; i < stat_len; ++i) {
    const double tau = static_cast<double>((stat_lo + i) * nfft) /
                       static_cast<double>(kEnvFft);
    env_window[i] =
        0.5 - 0.5 * std::cos(kTwoPi * tau / static_cast<double>(frame_len - 1));
  }

  RoughnessSeries series;
  series.values.resize(frames);

  std::vector<std::complex<double>> spec(nfft);
  std::vector<std::vector<double>> env_ac(kRoughChannels);
  std::vector<double> depth(kRoughChannels);
  std::vector<double> ac_rms(kRoughChannels);

  for (std::size_t j = 0; j < frames; ++j) {
    auto start = static_cast<std::size_t>(
        std::llround(static_cast<double>(j) * 0.2 * fs));
    start = std::min(start, n - frame_len);
    double frame_power = 0.0;
    for (std::size_t i = 0; i < nfft; ++i) {
      const double v = i < frame_len ? signal.samples[start + i] * window[i] : 0.0;
      spec[i] = {v, 0.0};
      frame_power += v * v;
    }
    fft::forward(spec);

    for (int c = 0; c < kRoughChannels; ++c) {
      const double zc = 0.5 + 0.5 * static_cast<double>(c);
      auto lo = static_cast<std::size_t>(
          std::lower_bound(bin_bark.begin(), bin_bark.end(), zc - kChannelHalfwidth) -
          bin_bark.begin());
      if (lo == 0) lo = 1;
      std::vector<std::complex<double>> cbuf(kEnvFft, {0.0, 0.0});
      double slice_power = 0.0;
      for (std::size_t k = lo;
           k < bin_bark.size() && bin_bark[k] < zc + kChannelHalfwidth; ++k) {
        if (k - lo >= kEnvFft) break;
        const double d = (bin_bark[k] - zc) / kChannelHalfwidth;  // in [-1, 1]
        const double gain = 0.5 * (1.0 + std::cos(kPi * d));
        cbuf[k - lo] = spec[k] * gain;
        slice_power += std::norm(cbuf[k - lo]);
      }
      // Channels carrying a negligible share of the frame do not move the
      // squared sum; skip their envelope analysis. slice_power relates to
      // the time-domain frame power through Parseval (factor nfft).
      if (frame_power == 0.0 ||
          slice_power < 1.5e-4 * static_cast<double>(nfft) * frame_power) {
        depth[c] = 0.0;
        ac_rms[c] = 0.0;
        env_ac[c].assign(stat_len, 0.0);
        continue;
      }
      fft::inverse(cbuf);

      // Baseband analytic slice: |.| is the channel envelope. Dividing by
      // the analysis window profile removes its bump from the modulation
      // measurement; stats are restricted to the central region where the
      // window is well away from zero.
      std::vector<double>& ac = env_ac[c];
      ac.resize(stat_len);
      double mean = 0.0;
      for (std::size_t i = 0; i < stat_len; ++i) {
        ac[i] = std::abs(cbuf[stat_lo + i]) / env_window[i];
        mean += ac[i];
      }
      mean /= static_cast<double>(stat_len);
      double acc = 0.0;
      for (auto& v : ac) {
        v -= mean;
        acc += v * v;
      }
      ac_rms[c] = std::sqrt(acc / static_cast<double>(stat_len));

      if (mean < 1e-12) {
        depth[c] = 0.0;
        continue;
      }
      // Weighted modulation depth from the envelope's one-sided powers.
      const auto mod_powers = windowed_powers(ac.data(), stat_len, {}, kEnvFft);
      double weighted = 0.0;
      for (std::size_t k = 1; k < mod_powers.size(); ++k) {
        const double f = static_cast<double>(k) * env_rate / static_cast<double>(kEnvFft);
        if (f > 1000.0) break;
        const double w = roughness_weight(f);
        weighted += mod_powers[k] * w * w;
      }
      depth[c] = std::min(std::sqrt(2.0 * weighted) / mean, 1.2);
    }

    // Cross-band envelope correlation (channels one Bark apart) suppresses
    // incoherent broadband fluctuation.
    auto correlation = [&](int a, int b) {
      if (ac_rms[a] < 1e-12 || ac_rms[b] < 1e-12) return 0.0;
      double acc = 0.0;
      for (std::size_t i = 0; i < stat_len; ++i) acc += env_ac[a][i] * env_ac[b][i];
      const double r = acc / (static_cast<double>(stat_len) * ac_rms[a] * ac_rms[b]);
      return std::clamp(r, 0.0, 1.0);
    };
    double sum = 0.0;
    for (int c = 0; c < kRoughChannels; ++c) {
      const double k_lo = c >= 2 ? correlation(c, c - 2) : correlation(c, c + 2);
      const double k_hi =
          c < kRoughChannels - 2 ? correlation(c, c + 2) : correlation(c, c - 2);
      const double term = depth[c] * k_lo * k_hi;
      sum += term * term;
    }
    series.values[j] = kRoughnessCal * sum;
  }
  return series;
}

FluctuationSeries timevarying_fluctuation(const LoudnessSeries& loudness) {
  const std::size_t n = loudness.values.size();
  const double series_rate = 1.0 / loudness.frame_period_s;
  const auto win_len = static_cast<std::size_t>(std::llround(series_rate));  // 1 s
  const std::size_t half = win_len / 2;

  // Reflect-pad so every output sample sees a full window.
  std::vector<double> padded(n + 2 * half);
  for (std::size_t i = 0; i < half; ++i) {
    padded[i] = loudness.values[std::min(half - i, n - 1)];
    padded[half + n + i] = loudness.values[n >= 2 + i ? n - 2 - i : 0];
  }
  std::copy(loudness.values.begin(), loudness.values.end(),
            padded.begin() + static_cast<std::ptrdiff_t>(half));

  const std::vector<double> window = hann(win_len);
  const double window_sum = std::accumulate(window.begin(), window.end(), 0.0);
  const std::size_t nfft = fft::next_pow2(win_len);

  FluctuationSeries out;
  out.values.resize(n);
  std::vector<double> segment_ac(win_len);
  for (std::size_t i = 0; i < n; ++i) {
    const double* seg = padded.data() + i;
    double local_mean = 0.0;
    for (std::size_t k = 0; k < win_len; ++k) local_mean += seg[k] * window[k];
    local_mean /= window_sum;
    if (local_mean < 1e-9) {
      out.values[i] = 0.0;
      continue;
    }
    // The weighted mean is removed before windowing so a constant series
    // contributes nothing at any modulation bin.
    for (std::size_t k = 0; k < win_len; ++k) segment_ac[k] = seg[k] - local_mean;
    const auto powers = windowed_powers(segment_ac.data(), win_len, window, nfft);
    double weighted = 0.0;
    for (std::size_t k = 1; k < powers.size(); ++k) {
      const double f = static_cast<double>(k) * series_rate / static_cast<double>(nfft);
      const double w = fluctuation_weight(f);
      weighted += powers[k] * w * w;
    }
    out.values[i] = kFluctuationCal * std::sqrt(2.0 * weighted) / local_mean;
  }
  return out;
}

FluctuationSeries timevarying_fluctuation(const TimeSignal& signal) {
  if (signal.duration_s() < 1.0) {
    throw SignalTooShort("fluctuation needs >= 1.0 s");
  }
  return timevarying_fluctuation(timevarying_loudness(signal));
}

LoudnessSeries highpass_loudness(const LoudnessSeries& series) {
  const double series_rate = 1.0 / series.frame_period_s;
  const FilterKernel kernel =
      design_fir_window(10.0, std::nullopt, series_rate, FilterKind::high_pass);
  if (series.values.size() <= 3 * kernel.taps.size()) {
    throw SeriesTooShort("loudness series too short for the 10 Hz high-pass");
  }
  const double mean = mean_of(series.values);
  LoudnessSeries out = series;
  out.values = filter_zero_phase(series.values, kernel);
  for (auto& v : out.values) v += mean;
  return out;
}

double impulse_factor(const std::vector<double>& values) {
  if (values.empty()) throw TooFewValues("impulse factor of empty sequence");
  const double mean = mean_of(values);
  if (!(mean > 0.0)) throw ZeroMean("impulse factor needs a positive mean");
  return *std::max_element(values.begin(), values.end()) / mean;
}

double variance(const std::vector<double>& values) {
  if (values.size() < 2) throw TooFewValues("variance needs >= 2 values");
  const double mean = mean_of(values);
  double acc = 0.0;
  for (double v : values) acc += (v - mean) * (v - mean);
  return acc / static_cast<double>(values.size());
}

double kurtosis(const std::vector<double>& values) {
  if (values.size() < 4) throw TooFewValues("kurtosis needs >= 4 values");
  const double mean = mean_of(values);
  double m2 = 0.0, m4 = 0.0;
  for (double v : values) {
    const double d = v - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  m2 /= static_cast<double>(values.size());
  m4 /= static_cast<double>(values.size());
  if (!(m2 > 0.0)) throw DegenerateVariance("kurtosis of a constant sequence");
  return m4 / (m2 * m2);
}

FeatureVector spa_features(const TimeSignal& signal) {
  if (signal.duration_s() < 1.0) throw SignalTooShort("SPA needs >= 1 s");
  FeatureVector out;
  out.push("spa_loudness", stationary_loudness(signal).total_sone);
  out.push("spa_roughness", mean_of(timevarying_roughness(signal).values));
  out.push("spa_fluctuation", mean_of(timevarying_fluctuation(signal).values));
  return out;
}

FeatureVector tvpa_features(const TimeSignal& signal) {
  if (signal.duration_s() < 1.0) throw SignalTooShort("TVPA needs >= 1 s");
  const LoudnessSeries loudness = timevarying_loudness(signal);
  FeatureVector out;
  out.push("tvpa_loudness_impulse",
           impulse_factor(highpass_loudness(loudness).values));
  out.push("tvpa_roughness_variance", variance(timevarying_roughness(signal).values));
  out.push("tvpa_fluctuation_kurtosis",
           kurtosis(timevarying_fluctuation(loudness).values));
  return out;
}

}  // namespace gearsound
