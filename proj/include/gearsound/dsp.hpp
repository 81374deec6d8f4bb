#pragma once

#include <optional>
#include <vector>

#include "gearsound/errors.hpp"
#include "gearsound/time_signal.hpp"

namespace gearsound {

enum class FilterKind { band_pass, high_pass };

// Linear-phase windowed-sinc FIR kernel. Tap count is the largest odd
// integer <= round(7.5 * design_rate_hz / lower_cutoff_hz), i.e. the window
// spans 7.5 periods of the lower cutoff.
struct FilterKernel {
  std::vector<double> taps;
  FilterKind kind = FilterKind::band_pass;
  double lower_cutoff_hz = 0.0;
  std::optional<double> upper_cutoff_hz;
  double design_rate_hz = 0.0;
};

// One-sided magnitude spectrum with explicit frequency axis.
// frequencies_hz[k] = k * resolution_hz, resolution_hz = rate / length.
struct SpectrumBins {
  std::vector<double> frequencies_hz;
  std::vector<double> magnitudes;
  double resolution_hz = 0.0;
};

// Hamming-windowed sinc design. Passband gain is normalized to unity at the
// band center (band-pass) or held at unity by construction (high-pass).
// Throws InvalidCutoffs when the cutoffs do not satisfy
// 0 < L < rate/2 (and L < H < rate/2 for band-pass).
FilterKernel design_fir_window(double lower_cutoff_hz,
                               std::optional<double> upper_cutoff_hz,
                               double design_rate_hz, FilterKind kind);

// Evaluates the kernel's frequency response magnitude at one frequency.
double kernel_response(const FilterKernel& kernel, double frequency_hz);

// Forward-backward application: zero net phase, squared magnitude response.
// Input is reflect-padded by one kernel length per side and trimmed after,
// so output length equals input length. Requires length > 3 * tap count.
TimeSignal filter_zero_phase(const TimeSignal& signal, const FilterKernel& kernel);
std::vector<double> filter_zero_phase(const std::vector<double>& values,
                                      const FilterKernel& kernel);

// |x + j*Hilbert(x)| via the frequency-domain analytic-signal construction
// (positive frequencies doubled, Nyquist weighted once for even lengths).
std::vector<double> analytic_envelope(const std::vector<double>& values);
std::vector<double> analytic_envelope(const TimeSignal& signal);

// One-sided amplitude spectrum, normalized so a unit-amplitude bin-centered
// sinusoid yields magnitude 1.0 and the DC bin carries the mean.
SpectrumBins magnitude_spectrum(const std::vector<double>& values,
                                double design_rate_hz);

}  // namespace gearsound
