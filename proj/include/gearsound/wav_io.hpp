#pragma once

#include <string>

#include "gearsound/errors.hpp"
#include "gearsound/time_signal.hpp"

namespace gearsound {

enum class WavEncoding { pcm16, pcm24, float32 };

// Reads a mono RIFF/WAVE file (PCM 16/24-bit or 32-bit float). Samples are
// scaled to [-1, 1] full scale and multiplied by calibration_pa_per_fullscale.
TimeSignal load_wav(const std::string& path,
                    double calibration_pa_per_fullscale = 1.0);

// Writes signal.samples / calibration as the chosen encoding. Round-tripping
// through float32 is lossless; integer encodings are exact to one
// quantization step.
void save_wav(const TimeSignal& signal, const std::string& path,
              WavEncoding encoding = WavEncoding::float32);

}  // namespace gearsound
