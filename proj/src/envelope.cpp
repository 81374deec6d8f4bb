#include "gearsound/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gearsound {

SpectrumBins envelope_spectrum(const TimeSignal& signal, EnvelopeKind kind,
                               double lower_cutoff_hz, double upper_cutoff_hz) {
  const FilterKernel kernel =
      design_fir_window(lower_cutoff_hz, upper_cutoff_hz, signal.sample_rate_hz,
                        FilterKind::band_pass);
  const std::vector<double> filtered = filter_zero_phase(signal.samples, kernel);
  std::vector<double> env = analytic_envelope(filtered);

  switch (kind) {
    case EnvelopeKind::NES:
      break;
    case EnvelopeKind::SES:
      for (auto& e : env) e = e * e;
      break;
    case EnvelopeKind::LES: {
      for (auto& e : env) e = e * e;
      const double peak = *std::max_element(env.begin(), env.end());
      // Relative floor: an absolute one would break gain invariance.
      const double eps = 1e-12 * peak;
      if (peak == 0.0) {
        std::fill(env.begin(), env.end(), 0.0);
      } else {
        for (auto& e : env) e = std::log(e + eps);
      }
      break;
    }
  }

  const double mean =
      std::accumulate(env.begin(), env.end(), 0.0) / static_cast<double>(env.size());
  for (auto& e : env) e -= mean;

  SpectrumBins spec = magnitude_spectrum(env, signal.sample_rate_hz);
  if (kind != EnvelopeKind::NES) {
    for (auto& m : spec.magnitudes) m = m * m;
  }
  return spec;
}

const char* envelope_kind_name(EnvelopeKind kind) {
  switch (kind) {
    case EnvelopeKind::NES: return "NES";
    case EnvelopeKind::SES: return "SES";
    case EnvelopeKind::LES: return "LES";
  }
  return "?";
}

}  // namespace gearsound
