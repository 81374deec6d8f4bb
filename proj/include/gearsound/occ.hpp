#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gearsound/errors.hpp"

namespace gearsound {

// Per-feature z-scoring fitted on the training matrix. Deviations are
// floored at 1e-12 so constant features stay finite.
struct Standardizer {
  std::vector<double> means;
  std::vector<double> deviations;

  std::vector<double> apply(const std::vector<double>& x) const;
};

struct BrmParams {
  int bag_count = 100;            // T
  double prototype_fraction = 0.1;  // p
  std::uint64_t seed = 0;
};

// Bagging-RandomMiner ensemble: each miner holds a prototype subset drawn
// from a bootstrap sample and a distance threshold delta (mean bootstrap
// distance to the nearest prototype, floored at 1e-9).
struct OccModel {
  struct Miner {
    std::vector<std::vector<double>> prototypes;  // standardized space
    double delta = 0.0;
  };
  Standardizer standardizer;
  std::vector<Miner> miners;
  BrmParams params;
  std::vector<std::string> feature_names;  // optional, for serialized models

  std::size_t dimension() const { return standardizer.means.size(); }
};

// Fits on healthy-only rows. Per miner t (randomness from
// derive_seed(params.seed, t), indices via next_u64() % n): draw a bootstrap
// of size n with replacement, pick max(1, ceil(p*n)) prototype positions
// without replacement from it, set delta to the mean nearest-prototype
// distance over the bootstrap members. Euclidean distance in z-scored space.
OccModel fit_brm(const std::vector<std::vector<double>>& train, BrmParams params);

// Mean over miners of exp(-d^2 / (2*delta^2)), d = distance to the nearest
// prototype of that miner. Lies in (0, 1].
double score_brm(const OccModel& model, const std::vector<double>& x);

// accept (healthy-like) iff score >= threshold.
bool classify(const OccModel& model, const std::vector<double>& x, double threshold);

// Versioned JSON round-trip for CLI train/score.
std::string occ_model_to_json(const OccModel& model);
OccModel occ_model_from_json(const std::string& text);
void save_occ_model(const OccModel& model, const std::string& path);
OccModel load_occ_model(const std::string& path);

}  // namespace gearsound
