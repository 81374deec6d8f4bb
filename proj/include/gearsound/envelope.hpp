#pragma once

#include "gearsound/dsp.hpp"
#include "gearsound/time_signal.hpp"

namespace gearsound {

// Normal, squared and logarithm envelope spectra. The squared variant works
// on the squared envelope and squares the resulting magnitudes; the log
// variant takes log(e^2 + eps) with a floor relative to max(e^2), which
// makes it exactly invariant to input gain at all non-DC bins.
enum class EnvelopeKind { NES, SES, LES };

// Band-pass (zero phase) -> analytic envelope -> per-kind transform ->
// mean removal -> one-sided magnitude spectrum (-> element-wise square for
// SES/LES). Mean removal keeps the envelope's large DC component out of the
// low-frequency bins where the fault features live.
SpectrumBins envelope_spectrum(const TimeSignal& signal, EnvelopeKind kind,
                               double lower_cutoff_hz, double upper_cutoff_hz);

const char* envelope_kind_name(EnvelopeKind kind);

}  // namespace gearsound
