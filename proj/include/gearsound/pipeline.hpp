#pragma once

#include <map>
#include <string>
#include <vector>

#include "gearsound/config.hpp"
#include "gearsound/dataset.hpp"
#include "gearsound/feature_vector.hpp"
#include "gearsound/time_signal.hpp"

namespace gearsound {

// One feature vector for one signal. The envelope sets are the expert
// features (max magnitude in the +/-1% windows around each fault frequency)
// of the corresponding envelope spectrum; the psychoacoustic sets are
// computed on the band-passed signal; les_tvpa concatenates the LES block
// first, then the TVPA block.
FeatureVector extract_features(const TimeSignal& signal, FeatureSet set,
                               const PipelineConfig& config);

// All requested sets in one pass over the signal (band-pass, envelope and
// the psychoacoustic series are shared between sets).
std::map<FeatureSet, FeatureVector> extract_feature_sets(
    const TimeSignal& signal, const std::vector<FeatureSet>& sets,
    const PipelineConfig& config);

struct FeatureMatrix {
  std::vector<std::string> feature_names;
  std::vector<std::string> ids;
  std::vector<HealthState> labels;
  std::vector<Split> splits;
  std::vector<std::vector<double>> rows;  // manifest order
};

// Loads every manifest sample and extracts one feature set, fanning out
// over a small worker pool; rows are stored in manifest order so outputs
// are byte-stable.
FeatureMatrix features_for_manifest(const std::vector<DatasetSample>& manifest,
                                    FeatureSet set, const PipelineConfig& config);

// Same, but computes all requested sets while each signal is loaded once.
std::map<FeatureSet, FeatureMatrix> feature_sets_for_manifest(
    const std::vector<DatasetSample>& manifest, const std::vector<FeatureSet>& sets,
    const PipelineConfig& config);

void write_feature_csv(const FeatureMatrix& matrix, const std::string& path,
                       const std::string& provenance_comment);
FeatureMatrix read_feature_csv(const std::string& path);

}  // namespace gearsound
