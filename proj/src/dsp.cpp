#include "gearsound/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include "gearsound/fft.hpp"

namespace gearsound {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

// Largest odd tap count <= round(7.5 periods of the lower cutoff).
std::size_t tap_count_for(double lower_cutoff_hz, double design_rate_hz) {
  const auto rounded = static_cast<long long>(
      std::llround(7.5 * design_rate_hz / lower_cutoff_hz));
  long long n = rounded;
  if (n % 2 == 0) --n;
  if (n < 3) n = 3;
  return static_cast<std::size_t>(n);
}

// sin(2*pi*fc*m)/(pi*m) with the m = 0 limit; fc in cycles per sample.
double sinc_lowpass(double fc, double m) {
  if (m == 0.0) return 2.0 * fc;
  return std::sin(2.0 * kPi * fc * m) / (kPi * m);
}

std::vector<double> hamming_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.54 - 0.46 * std::cos(2.0 * kPi * static_cast<double>(i) /
                                  static_cast<double>(n - 1));
  }
  return w;
}

// Direct convolution, 'same' alignment for an odd symmetric kernel.
// x is assumed already padded; writes y over the central region.
std::vector<double> convolve_same(const std::vector<double>& x,
                                  const std::vector<double>& h) {
  const std::size_t n = x.size();
  const std::size_t m = h.size();
  const std::size_t half = m / 2;
  std::vector<double> y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k_lo = i + half >= n ? i + half - n + 1 : 0;
    const std::size_t k_hi = std::min(m - 1, i + half);
    double acc = 0.0;
    for (std::size_t k = k_lo; k <= k_hi; ++k) {
      acc += h[k] * x[i + half - k];
    }
    y[i] = acc;
  }
  return y;
}

}  // namespace

FilterKernel design_fir_window(double lower_cutoff_hz,
                               std::optional<double> upper_cutoff_hz,
                               double design_rate_hz, FilterKind kind) {
  const double nyquist = design_rate_hz / 2.0;
  if (!(design_rate_hz > 0.0) || !(lower_cutoff_hz > 0.0) ||
      !(lower_cutoff_hz < nyquist)) {
    throw InvalidCutoffs("lower cutoff must satisfy 0 < L < rate/2");
  }
  if (kind == FilterKind::band_pass) {
    if (!upper_cutoff_hz || !(*upper_cutoff_hz > lower_cutoff_hz) ||
        !(*upper_cutoff_hz < nyquist)) {
      throw InvalidCutoffs("band-pass requires L < H < rate/2");
    }
  }

  const std::size_t n = tap_count_for(lower_cutoff_hz, design_rate_hz);
  const auto center = static_cast<double>(n / 2);
  const std::vector<double> w = hamming_window(n);

  FilterKernel kernel;
  kernel.kind = kind;
  kernel.lower_cutoff_hz = lower_cutoff_hz;
  kernel.upper_cutoff_hz = upper_cutoff_hz;
  kernel.design_rate_hz = design_rate_hz;
  kernel.taps.resize(n);

  // Taps are computed for one half and mirrored so the linear-phase
  // symmetry taps[i] == taps[n-1-i] holds exactly, not just to rounding.
  const double f_lo = lower_cutoff_hz / design_rate_hz;
  if (kind == FilterKind::band_pass) {
    const double f_hi = *upper_cutoff_hz / design_rate_hz;
    for (std::size_t i = 0; i <= n / 2; ++i) {
      const double m = static_cast<double>(i) - center;
      const double t = (sinc_lowpass(f_hi, m) - sinc_lowpass(f_lo, m)) * w[i];
      kernel.taps[i] = t;
      kernel.taps[n - 1 - i] = t;
    }
    const double band_center = 0.5 * (lower_cutoff_hz + *upper_cutoff_hz);
    const double gain = kernel_response(kernel, band_center);
    for (auto& t : kernel.taps) t /= gain;
  } else {
    // Spectral inversion of a unity-DC low-pass keeps the DC zero exact.
    std::vector<double> lp(n);
    for (std::size_t i = 0; i <= n / 2; ++i) {
      const double m = static_cast<double>(i) - center;
      const double t = sinc_lowpass(f_lo, m) * w[i];
      lp[i] = t;
      lp[n - 1 - i] = t;
    }
    const double dc = std::accumulate(lp.begin(), lp.end(), 0.0);
    for (auto& t : lp) t /= dc;
    for (std::size_t i = 0; i < n; ++i) kernel.taps[i] = -lp[i];
    kernel.taps[n / 2] += 1.0;
  }
  return kernel;
}

double kernel_response(const FilterKernel& kernel, double frequency_hz) {
  // Symmetric taps give a real response up to the linear-phase factor, so
  // the magnitude is |sum taps[i] * exp(-j*2*pi*f*i/rate)|.
  const double omega = 2.0 * kPi * frequency_hz / kernel.design_rate_hz;
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t i = 0; i < kernel.taps.size(); ++i) {
    const double ang = -omega * static_cast<double>(i);
    acc += kernel.taps[i] * std::complex<double>{std::cos(ang), std::sin(ang)};
  }
  return std::abs(acc);
}

std::vector<double> filter_zero_phase(const std::vector<double>& values,
                                      const FilterKernel& kernel) {
  const std::size_t n = values.size();
  const std::size_t m = kernel.taps.size();
  if (n <= 3 * m) {
    throw SignalTooShort("zero-phase filtering needs length > 3 * tap count");
  }

  // Reflect-pad one kernel length per side (mirror about the edge sample).
  std::vector<double> padded(n + 2 * m);
  for (std::size_t i = 0; i < m; ++i) padded[i] = values[m - i];
  std::copy(values.begin(), values.end(), padded.begin() + static_cast<std::ptrdiff_t>(m));
  for (std::size_t i = 0; i < m; ++i) padded[m + n + i] = values[n - 2 - i];

  std::vector<double> fwd = convolve_same(padded, kernel.taps);
  std::reverse(fwd.begin(), fwd.end());
  std::vector<double> bwd = convolve_same(fwd, kernel.taps);
  std::reverse(bwd.begin(), bwd.end());

  return {bwd.begin() + static_cast<std::ptrdiff_t>(m),
          bwd.begin() + static_cast<std::ptrdiff_t>(m + n)};
}

TimeSignal filter_zero_phase(const TimeSignal& signal, const FilterKernel& kernel) {
  TimeSignal out = signal;
  out.samples = filter_zero_phase(signal.samples, kernel);
  return out;
}

std::vector<double> analytic_envelope(const std::vector<double>& values) {
  const std::size_t n = values.size();
  if (n < 2) throw SignalTooShort("analytic envelope needs length >= 2");

  std::vector<std::complex<double>> spec = fft::forward_real(values);
  // Zero out negative frequencies, double the positive ones; DC and (for
  // even lengths) Nyquist are kept with weight one.
  const std::size_t half = n / 2;
  for (std::size_t k = 1; k < half + (n % 2 ? 1 : 0); ++k) spec[k] *= 2.0;
  for (std::size_t k = half + 1; k < n; ++k) spec[k] = {0.0, 0.0};
  fft::inverse(spec);

  std::vector<double> env(n);
  for (std::size_t i = 0; i < n; ++i) env[i] = std::abs(spec[i]);
  return env;
}

std::vector<double> analytic_envelope(const TimeSignal& signal) {
  return analytic_envelope(signal.samples);
}

SpectrumBins magnitude_spectrum(const std::vector<double>& values,
                                double design_rate_hz) {
  const std::size_t n = values.size();
  if (n < 2) throw SignalTooShort("spectrum needs length >= 2");

  std::vector<std::complex<double>> spec = fft::forward_real(values);
  const std::size_t bins = n / 2 + 1;

  SpectrumBins out;
  out.resolution_hz = design_rate_hz / static_cast<double>(n);
  out.frequencies_hz.resize(bins);
  out.magnitudes.resize(bins);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < bins; ++k) {
    out.frequencies_hz[k] = static_cast<double>(k) * out.resolution_hz;
    const bool edge = (k == 0) || (n % 2 == 0 && k == n / 2);
    out.magnitudes[k] = std::abs(spec[k]) * inv_n * (edge ? 1.0 : 2.0);
  }
  return out;
}

}  // namespace gearsound
