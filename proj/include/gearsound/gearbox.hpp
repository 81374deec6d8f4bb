#pragma once

#include <string>
#include <vector>

#include "gearsound/dsp.hpp"
#include "gearsound/errors.hpp"
#include "gearsound/feature_vector.hpp"

namespace gearsound {

// Gearbox construction knowledge. teeth holds z1..z_{2s}: per stage s the
// pair (z_{2s-1} driving, z_{2s} driven), numbered from the motor shaft.
struct GearGeometry {
  double rated_speed_rpm = 0.0;
  std::vector<int> teeth;

  std::size_t stage_count() const { return teeth.size() / 2; }
  void validate() const;
};

// Ordered (label, frequency) list of expected fault repetition rates.
struct FaultFrequencySet {
  struct Entry {
    std::string label;
    double frequency_hz;
  };
  std::vector<Entry> entries;
  double min_frequency_hz = 10.0;

  std::size_t size() const { return entries.size(); }
};

// One frequency per shaft (s+1 shafts): f1 = rpm/60, then scaled by the
// tooth ratio of each stage.
std::vector<double> shaft_frequencies(const GearGeometry& geometry);

// Shaft harmonics k*f_n (k = 1..k_max), gear mesh frequencies f_s * z_{2s-1}
// and mesh sidebands mesh_s +/- f_n for the two shafts n in {s, s+1} that
// carry stage s. Entries below min_hz are dropped individually; a shaft
// whose own frequency is below the floor still contributes its higher
// harmonics, meshes and sidebands.
FaultFrequencySet enumerate_fault_frequencies(const GearGeometry& geometry,
                                              int k_max = 4, double min_hz = 10.0);

// One feature per fault frequency: the maximum magnitude over bins whose
// frequency lies in [ff*(1-tol), ff*(1+tol)] (inclusive edges). A window
// narrower than one bin still evaluates the nearest bin.
FeatureVector extract_expert_features(const SpectrumBins& spectrum,
                                      const FaultFrequencySet& ffs,
                                      double tolerance_rel = 0.01);

}  // namespace gearsound
