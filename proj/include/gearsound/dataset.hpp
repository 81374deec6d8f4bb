#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gearsound/synth.hpp"

namespace gearsound {

enum class Split { train, test };

struct DatasetSample {
  std::string id;
  std::string path;
  HealthState label = HealthState::healthy;
  NoiseSpec noise;
  Split split = Split::train;
};

// Counts and synthesis parameters of one generated dataset. The defaults
// produce 138 samples: 56 train (31 healthy + 25 minor) and 82 test
// (30 healthy, 30 minor, 22 major) of which 43 carry deliberate noise.
struct DatasetConfig {
  int train_healthy = 31;
  int train_minor = 25;
  int test_healthy = 30;
  int test_minor = 30;
  int test_major = 22;
  int noisy_test = 43;
  double duration_s = 5.0;
  double sample_rate_hz = 48000.0;
  double calibration_pa_per_fullscale = 1.0;
  GearGeometry geometry{1375.0, {16, 40, 12, 48}};
  double minor_gain_lo = 0.7;
  double minor_gain_hi = 1.3;
  double major_gain_lo = 4.0;
  double major_gain_hi = 7.0;

  int total() const {
    return train_healthy + train_minor + test_healthy + test_minor + test_major;
  }
};

// Synthesizes every sample into out_dir (float32 WAV), writes
// out_dir/manifest.csv and returns the manifest rows. Fully deterministic
// under (config, seed); the train split never contains a major fault.
std::vector<DatasetSample> generate_dataset(const DatasetConfig& config,
                                            std::uint64_t seed,
                                            const std::string& out_dir);

// Manifest CSV: header `id,path,label,noise_kind,noise_level_db,split`.
void write_manifest(const std::vector<DatasetSample>& samples,
                    const std::string& path);
std::vector<DatasetSample> read_manifest(const std::string& path);

}  // namespace gearsound
