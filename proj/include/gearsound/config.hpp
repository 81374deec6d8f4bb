#pragma once

#include <string>
#include <vector>

#include "gearsound/dataset.hpp"
#include "gearsound/occ.hpp"

namespace gearsound {

enum class FeatureSet { nes, ses, les, spa, tvpa, les_tvpa };

const char* feature_set_name(FeatureSet set);        // "NES" .. "LES+TVPA"
FeatureSet feature_set_from_string(const std::string& name);  // accepts "les+tvpa" etc.
std::vector<FeatureSet> all_feature_sets();

// Everything one run needs: dataset counts and gear geometry, the analysis
// band (defaults 1150 / 5100 Hz), the fault-frequency floor (10 Hz) and
// tolerance (1 %), harmonic count, classifier parameters, feature-set
// selection. digest identifies the exact config bytes in every output.
struct PipelineConfig {
  DatasetConfig dataset;
  double band_low_hz = 1150.0;
  double band_high_hz = 5100.0;
  double ff_min_hz = 10.0;
  double ff_tolerance_rel = 0.01;
  int k_max = 4;
  BrmParams occ;
  std::vector<FeatureSet> feature_sets = all_feature_sets();
  std::string digest;

  void validate() const;
};

PipelineConfig default_pipeline_config();
PipelineConfig load_pipeline_config(const std::string& path);

// FNV-1a 64 of the raw bytes, 16 hex digits.
std::string config_digest(const std::string& bytes);

// Canonical serialization of the effective values (also a valid config
// file); gives configs without a backing file a stable digest.
std::string canonical_config_toml(const PipelineConfig& config);

}  // namespace gearsound
