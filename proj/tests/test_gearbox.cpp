#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "gearsound/gearbox.hpp"
#include "gearsound/rng.hpp"

using namespace gearsound;

namespace {

const GearGeometry kReference{1375.0, {16, 40, 12, 48}};

SpectrumBins flat_spectrum(double resolution, double top, double level) {
  SpectrumBins spec;
  spec.resolution_hz = resolution;
  const auto bins = static_cast<std::size_t>(top / resolution) + 1;
  for (std::size_t k = 0; k < bins; ++k) {
    spec.frequencies_hz.push_back(static_cast<double>(k) * resolution);
    spec.magnitudes.push_back(level);
  }
  return spec;
}

}  // namespace

TEST_CASE("shaft frequencies of the reference geometry") {
  const auto f = shaft_frequencies(kReference);
  REQUIRE(f.size() == 3);
  CHECK(f[0] == doctest::Approx(22.9167).epsilon(1e-4));
  CHECK(f[1] == doctest::Approx(9.1667).epsilon(1e-4));
  CHECK(f[2] == doctest::Approx(2.2917).epsilon(1e-4));
}

TEST_CASE("a unity-ratio stage leaves the shaft frequency unchanged") {
  const auto f = shaft_frequencies(GearGeometry{1200.0, {20, 20}});
  CHECK(f[1] == doctest::Approx(f[0]).epsilon(1e-12));
}

TEST_CASE("total ratio of the reference gearbox is exactly 10") {
  const auto f = shaft_frequencies(kReference);
  CHECK(f[0] / f[2] == doctest::Approx(10.0).epsilon(1e-12));
  // Rational route: product of stage ratios.
  CHECK((40.0 / 16.0) * (48.0 / 12.0) == 10.0);
}

TEST_CASE("fault frequency enumeration matches the hand-computed set") {
  const auto set = enumerate_fault_frequencies(kReference, 4, 10.0);
  std::map<std::string, double> got;
  for (const auto& e : set.entries) got[e.label] = e.frequency_hz;

  const double f1 = 1375.0 / 60.0;
  const double f2 = f1 * 16.0 / 40.0;
  const double f3 = f2 * 12.0 / 48.0;
  const double mesh1 = f1 * 16.0;
  const double mesh2 = f2 * 12.0;

  const std::map<std::string, double> expected = {
      {"shaft1_k1", f1},          {"shaft1_k2", 2 * f1},
      {"shaft1_k3", 3 * f1},      {"shaft1_k4", 4 * f1},
      {"shaft2_k2", 2 * f2},      {"shaft2_k3", 3 * f2},
      {"shaft2_k4", 4 * f2},      {"mesh1", mesh1},
      {"mesh2", mesh2},           {"mesh1-shaft1_lo", mesh1 - f1},
      {"mesh1-shaft1_hi", mesh1 + f1}, {"mesh1-shaft2_lo", mesh1 - f2},
      {"mesh1-shaft2_hi", mesh1 + f2}, {"mesh2-shaft2_lo", mesh2 - f2},
      {"mesh2-shaft2_hi", mesh2 + f2}, {"mesh2-shaft3_lo", mesh2 - f3},
      {"mesh2-shaft3_hi", mesh2 + f3},
  };
  CHECK(got.size() == expected.size());
  for (const auto& [label, freq] : expected) {
    REQUIRE_MESSAGE(got.count(label) == 1, label);
    CHECK(got[label] == doctest::Approx(freq).epsilon(1e-12));
  }
  // Spot values quoted to two decimals.
  CHECK(got["mesh1"] == doctest::Approx(366.67).epsilon(1e-4));
  CHECK(got["mesh2"] == doctest::Approx(110.0).epsilon(1e-9));
  CHECK(got["mesh2-shaft2_lo"] == doctest::Approx(100.83).epsilon(1e-3));
  CHECK(got["mesh2-shaft2_hi"] == doctest::Approx(119.17).epsilon(1e-3));
  CHECK(got["mesh2-shaft3_lo"] == doctest::Approx(107.71).epsilon(1e-3));
  CHECK(got["mesh2-shaft3_hi"] == doctest::Approx(112.29).epsilon(1e-3));
}

TEST_CASE("the 10 Hz floor drops entries individually, not per shaft") {
  const auto set = enumerate_fault_frequencies(kReference, 4, 10.0);
  int shaft2 = 0, shaft3 = 0;
  for (const auto& e : set.entries) {
    CHECK(e.frequency_hz >= 10.0);
    if (e.label.rfind("shaft2_", 0) == 0) ++shaft2;
    if (e.label.rfind("shaft3_", 0) == 0) ++shaft3;
  }
  CHECK(shaft2 == 3);  // k=1 at 9.17 Hz is below the floor
  CHECK(shaft3 == 0);  // 2.29 Hz shaft: all harmonics below the floor
  // but the slow shaft still contributes its mesh sidebands
  bool has_slow_sideband = false;
  for (const auto& e : set.entries) {
    if (e.label == "mesh2-shaft3_lo") has_slow_sideband = true;
  }
  CHECK(has_slow_sideband);
}

TEST_CASE("expert features take the window maximum") {
  auto spec = flat_spectrum(0.1, 500.0, 0.01);
  spec.magnitudes[301] = 0.9;  // 30.1 Hz, inside [29.7, 30.3]
  FaultFrequencySet ffs;
  ffs.entries.push_back({"ff30", 30.0});
  const auto features = extract_expert_features(spec, ffs, 0.01);
  REQUIRE(features.size() == 1);
  CHECK(features.names[0] == "ff30");
  CHECK(features.values[0] == doctest::Approx(0.9));
}

TEST_CASE("peaks outside the tolerance window are excluded") {
  auto spec = flat_spectrum(0.1, 500.0, 0.01);
  spec.magnitudes[305] = 0.9;  // 30.5 Hz, outside [29.7, 30.3]
  FaultFrequencySet ffs;
  ffs.entries.push_back({"ff30", 30.0});
  const auto features = extract_expert_features(spec, ffs, 0.01);
  CHECK(features.values[0] == doctest::Approx(0.01));
}

TEST_CASE("feature vector preserves fault-frequency order and length") {
  const auto set = enumerate_fault_frequencies(kReference, 4, 10.0);
  const auto spec = flat_spectrum(0.2, 600.0, 0.05);
  const auto features = extract_expert_features(spec, set, 0.01);
  REQUIRE(features.size() == set.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    CHECK(features.names[i] == set.entries[i].label);
  }
}

TEST_CASE("a spectrum not covering the highest fault frequency is rejected") {
  const auto set = enumerate_fault_frequencies(kReference, 4, 10.0);
  const auto spec = flat_spectrum(0.2, 360.0, 0.05);  // mesh1 sidebands reach ~390 Hz
  CHECK_THROWS_AS(extract_expert_features(spec, set, 0.01), SpectrumTooNarrow);
}

TEST_CASE("enlarging the tolerance never decreases a feature") {
  Rng rng(404);
  for (int trial = 0; trial < 20; ++trial) {
    auto spec = flat_spectrum(0.25, 500.0, 0.0);
    for (auto& m : spec.magnitudes) m = rng.uniform();
    FaultFrequencySet ffs;
    ffs.entries.push_back({"a", 22.9167});
    ffs.entries.push_back({"b", 110.0});
    ffs.entries.push_back({"c", 366.67});
    const auto narrow = extract_expert_features(spec, ffs, 0.005);
    const auto wide = extract_expert_features(spec, ffs, 0.03);
    for (std::size_t i = 0; i < ffs.size(); ++i) {
      CHECK(wide.values[i] >= narrow.values[i]);
    }
  }
}

TEST_CASE("the 1% window absorbs 0.5% speed error but rejects 2%") {
  auto spec = flat_spectrum(0.01, 50.0, 0.001);
  const double ff = 30.0;
  const auto at = [&](double f) {
    return static_cast<std::size_t>(std::llround(f / spec.resolution_hz));
  };
  spec.magnitudes[at(ff * 1.005)] = 1.0;
  FaultFrequencySet ffs;
  ffs.entries.push_back({"ff", ff});
  CHECK(extract_expert_features(spec, ffs, 0.01).values[0] == doctest::Approx(1.0));

  auto spec2 = flat_spectrum(0.01, 50.0, 0.001);
  spec2.magnitudes[at(ff * 1.02)] = 1.0;
  CHECK(extract_expert_features(spec2, ffs, 0.01).values[0] == doctest::Approx(0.001));
}

TEST_CASE("geometry validation") {
  CHECK_THROWS_AS(shaft_frequencies(GearGeometry{0.0, {16, 40}}), InvalidSpec);
  CHECK_THROWS_AS(shaft_frequencies(GearGeometry{1000.0, {16}}), InvalidSpec);
  CHECK_THROWS_AS(shaft_frequencies(GearGeometry{1000.0, {16, 2}}), InvalidSpec);
}
