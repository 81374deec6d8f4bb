#pragma once

#include <cstddef>
#include <vector>

namespace gearsound {

// Sampled acoustic pressure sequence. Samples are in pascal: digital full
// scale 1.0 corresponds to calibration_pa_per_fullscale pascal.
struct TimeSignal {
  std::vector<double> samples;
  double sample_rate_hz = 48000.0;
  double calibration_pa_per_fullscale = 1.0;

  std::size_t size() const { return samples.size(); }
  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
};

}  // namespace gearsound
