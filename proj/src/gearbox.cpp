#include "gearsound/gearbox.hpp"

#include <algorithm>
#include <cmath>

namespace gearsound {

void GearGeometry::validate() const {
  if (!(rated_speed_rpm > 0.0)) {
    throw InvalidSpec("rated speed must be positive");
  }
  if (teeth.empty() || teeth.size() % 2 != 0) {
    throw InvalidSpec("teeth must hold one (driving, driven) pair per stage");
  }
  for (int z : teeth) {
    if (z < 4) throw InvalidSpec("tooth counts below 4 are not a gear");
  }
}

std::vector<double> shaft_frequencies(const GearGeometry& geometry) {
  geometry.validate();
  const std::size_t stages = geometry.stage_count();
  std::vector<double> f(stages + 1);
  f[0] = geometry.rated_speed_rpm / 60.0;
  for (std::size_t s = 0; s < stages; ++s) {
    f[s + 1] = f[s] * static_cast<double>(geometry.teeth[2 * s]) /
               static_cast<double>(geometry.teeth[2 * s + 1]);
  }
  return f;
}

FaultFrequencySet enumerate_fault_frequencies(const GearGeometry& geometry,
                                              int k_max, double min_hz) {
  const std::vector<double> f = shaft_frequencies(geometry);
  const std::size_t stages = geometry.stage_count();

  FaultFrequencySet set;
  set.min_frequency_hz = min_hz;
  auto add = [&](std::string label, double freq) {
    if (freq >= min_hz) set.entries.push_back({std::move(label), freq});
  };

  // Shaft harmonics, by shaft then harmonic index.
  for (std::size_t n = 0; n < f.size(); ++n) {
    for (int k = 1; k <= k_max; ++k) {
      add("shaft" + std::to_string(n + 1) + "_k" + std::to_string(k),
          static_cast<double>(k) * f[n]);
    }
  }
  // Mesh frequencies, by stage.
  std::vector<double> mesh(stages);
  for (std::size_t s = 0; s < stages; ++s) {
    mesh[s] = f[s] * static_cast<double>(geometry.teeth[2 * s]);
    add("mesh" + std::to_string(s + 1), mesh[s]);
  }
  // Sidebands of each mesh at the frequencies of the two shafts it joins.
  for (std::size_t s = 0; s < stages; ++s) {
    for (std::size_t n : {s, s + 1}) {
      const std::string base =
          "mesh" + std::to_string(s + 1) + "-shaft" + std::to_string(n + 1);
      add(base + "_lo", mesh[s] - f[n]);
      add(base + "_hi", mesh[s] + f[n]);
    }
  }
  return set;
}

FeatureVector extract_expert_features(const SpectrumBins& spectrum,
                                      const FaultFrequencySet& ffs,
                                      double tolerance_rel) {
  if (spectrum.frequencies_hz.empty()) {
    throw SpectrumTooNarrow("empty spectrum");
  }
  const double top = spectrum.frequencies_hz.back();
  for (const auto& e : ffs.entries) {
    if (e.frequency_hz * (1.0 + tolerance_rel) > top) {
      throw SpectrumTooNarrow("spectrum does not cover " + e.label);
    }
  }

  FeatureVector out;
  const auto& freqs = spectrum.frequencies_hz;
  for (const auto& e : ffs.entries) {
    const double lo = e.frequency_hz * (1.0 - tolerance_rel);
    const double hi = e.frequency_hz * (1.0 + tolerance_rel);
    auto first = std::lower_bound(freqs.begin(), freqs.end(), lo);
    double best = 0.0;
    bool hit = false;
    for (auto it = first; it != freqs.end() && *it <= hi; ++it) {
      const auto idx = static_cast<std::size_t>(it - freqs.begin());
      best = hit ? std::max(best, spectrum.magnitudes[idx]) : spectrum.magnitudes[idx];
      hit = true;
    }
    if (!hit) {
      // Window fell between bins; take the nearest one.
      std::size_t idx = static_cast<std::size_t>(first - freqs.begin());
      if (idx >= freqs.size()) idx = freqs.size() - 1;
      if (idx > 0 &&
          std::abs(freqs[idx - 1] - e.frequency_hz) <= std::abs(freqs[idx] - e.frequency_hz)) {
        --idx;
      }
      best = spectrum.magnitudes[idx];
    }
    out.push(e.label, best);
  }
  return out;
}

}  // namespace gearsound
