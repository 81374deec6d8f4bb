#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gearsound/config.hpp"
#include "gearsound/dataset.hpp"
#include "gearsound/pipeline.hpp"

namespace gearsound {

// Staircase from threshold +inf down to -inf; starts at (0,0), ends at
// (1,1), both coordinates non-decreasing. Equal scores are grouped into one
// threshold step.
struct RocCurve {
  struct Point {
    double fpr;
    double tpr;
    double threshold;
  };
  std::vector<Point> points;
};

// scores are fault scores (higher = more fault-like); labels mark the
// positive (fault) class. Throws SingleClassInput when a class is missing.
RocCurve roc_curve(const std::vector<double>& scores, const std::vector<bool>& labels);

// Trapezoidal area; equals the Mann-Whitney pair statistic with ties
// counted 1/2 because tied scores share one threshold step.
double auc(const RocCurve& curve);

struct BenchmarkRow {
  std::string feature_set;
  double auc_h;  // positives: minor or major fault
  double auc_f;  // positives: major fault only
};

struct BenchmarkReport {
  std::vector<BenchmarkRow> rows;
  std::uint64_t seed = 0;
  std::string config_digest;
};

// For each configured feature set: extract features for every manifest
// sample, fit the one-class model on the train split, score the test split
// (fault score = 1 - similarity) and evaluate both AUC variants.
BenchmarkReport benchmark_run(const std::vector<DatasetSample>& manifest,
                              const PipelineConfig& config, std::uint64_t seed);

void write_benchmark_csv(const BenchmarkReport& report, const std::string& path);
void write_benchmark_json(const BenchmarkReport& report, const std::string& path);
void write_roc_csv(const RocCurve& curve, const std::string& path,
                   const std::string& provenance_comment);

// Kendall's coefficient of concordance with mid-rank ties and the standard
// ties correction. rankings[r][j] is ranker r's ordinal for item j (any
// monotone scale). Throws DegenerateInput when every ranker ties all items.
double kendalls_w(const std::vector<std::vector<double>>& rankings);

// Majority vote over exactly three ordinal labels; a three-way split
// resolves to the median severity.
HealthState aggregate_labels(const std::array<HealthState, 3>& votes);

}  // namespace gearsound
