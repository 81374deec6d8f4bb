#include "gearsound/occ.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "gearsound/rng.hpp"

namespace gearsound {

namespace {

constexpr double kDeltaFloor = 1e-9;
constexpr double kDeviationFloor = 1e-12;
constexpr int kModelFormatVersion = 1;

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

double nearest_prototype_distance(const std::vector<std::vector<double>>& prototypes,
                                  const std::vector<double>& x) {
  double best = squared_distance(prototypes.front(), x);
  for (std::size_t i = 1; i < prototypes.size(); ++i) {
    best = std::min(best, squared_distance(prototypes[i], x));
  }
  return std::sqrt(best);
}

}  // namespace

std::vector<double> Standardizer::apply(const std::vector<double>& x) const {
  if (x.size() != means.size()) {
    throw DimensionMismatch("expected " + std::to_string(means.size()) +
                            " features, got " + std::to_string(x.size()));
  }
  std::vector<double> z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    z[i] = (x[i] - means[i]) / deviations[i];
  }
  return z;
}

OccModel fit_brm(const std::vector<std::vector<double>>& train, BrmParams params) {
  if (train.empty()) throw EmptyTrainingSet("no training vectors");
  const std::size_t n = train.size();
  const std::size_t dim = train.front().size();
  for (const auto& row : train) {
    if (row.size() != dim) {
      throw DimensionMismatch("inconsistent training dimensionality");
    }
  }
  if (params.bag_count < 1) params.bag_count = 1;

  OccModel model;
  model.params = params;
  model.standardizer.means.assign(dim, 0.0);
  model.standardizer.deviations.assign(dim, 0.0);
  for (const auto& row : train) {
    for (std::size_t j = 0; j < dim; ++j) model.standardizer.means[j] += row[j];
  }
  for (std::size_t j = 0; j < dim; ++j) {
    model.standardizer.means[j] /= static_cast<double>(n);
  }
  for (const auto& row : train) {
    for (std::size_t j = 0; j < dim; ++j) {
      const double d = row[j] - model.standardizer.means[j];
      model.standardizer.deviations[j] += d * d;
    }
  }
  for (std::size_t j = 0; j < dim; ++j) {
    model.standardizer.deviations[j] =
        std::max(std::sqrt(model.standardizer.deviations[j] / static_cast<double>(n)),
                 kDeviationFloor);
  }

  std::vector<std::vector<double>> standardized(n);
  for (std::size_t i = 0; i < n; ++i) {
    standardized[i] = model.standardizer.apply(train[i]);
  }

  const auto prototype_count = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::ceil(params.prototype_fraction * static_cast<double>(n))));

  model.miners.resize(static_cast<std::size_t>(params.bag_count));
  for (std::size_t t = 0; t < model.miners.size(); ++t) {
    Rng rng(derive_seed(params.seed, t));

    std::vector<std::size_t> bootstrap(n);
    for (std::size_t i = 0; i < n; ++i) bootstrap[i] = rng.uniform_index(n);

    // Prototype positions: partial Fisher-Yates over the bootstrap order.
    std::vector<std::size_t> positions(n);
    for (std::size_t i = 0; i < n; ++i) positions[i] = i;
    const std::size_t take = std::min(prototype_count, n);
    for (std::size_t i = 0; i < take; ++i) {
      const std::size_t j = i + rng.uniform_index(n - i);
      std::swap(positions[i], positions[j]);
    }

    OccModel::Miner& miner = model.miners[t];
    miner.prototypes.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
      miner.prototypes.push_back(standardized[bootstrap[positions[i]]]);
    }

    double mean_distance = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mean_distance += nearest_prototype_distance(miner.prototypes,
                                                  standardized[bootstrap[i]]);
    }
    miner.delta = std::max(mean_distance / static_cast<double>(n), kDeltaFloor);
  }
  return model;
}

double score_brm(const OccModel& model, const std::vector<double>& x) {
  const std::vector<double> z = model.standardizer.apply(x);
  double acc = 0.0;
  for (const auto& miner : model.miners) {
    const double d = nearest_prototype_distance(miner.prototypes, z);
    acc += std::exp(-(d * d) / (2.0 * miner.delta * miner.delta));
  }
  // The kernel is mathematically positive; keep the score in (0, 1] even
  // when the exponentials underflow.
  return std::max(acc / static_cast<double>(model.miners.size()),
                  std::numeric_limits<double>::min());
}

bool classify(const OccModel& model, const std::vector<double>& x, double threshold) {
  return score_brm(model, x) >= threshold;
}

std::string occ_model_to_json(const OccModel& model) {
  nlohmann::json j;
  j["format_version"] = kModelFormatVersion;
  j["params"] = {{"bag_count", model.params.bag_count},
                 {"prototype_fraction", model.params.prototype_fraction},
                 {"seed", model.params.seed}};
  j["standardizer"] = {{"means", model.standardizer.means},
                       {"deviations", model.standardizer.deviations}};
  j["feature_names"] = model.feature_names;
  nlohmann::json miners = nlohmann::json::array();
  for (const auto& m : model.miners) {
    miners.push_back({{"delta", m.delta}, {"prototypes", m.prototypes}});
  }
  j["miners"] = std::move(miners);
  return j.dump(2);
}

OccModel occ_model_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig(std::string("bad model file: ") + e.what());
  }
  if (!j.contains("format_version") || j["format_version"].get<int>() != kModelFormatVersion) {
    throw InvalidConfig("unsupported model format version");
  }
  OccModel model;
  model.params.bag_count = j["params"]["bag_count"].get<int>();
  model.params.prototype_fraction = j["params"]["prototype_fraction"].get<double>();
  model.params.seed = j["params"]["seed"].get<std::uint64_t>();
  model.standardizer.means = j["standardizer"]["means"].get<std::vector<double>>();
  model.standardizer.deviations =
      j["standardizer"]["deviations"].get<std::vector<double>>();
  model.feature_names = j["feature_names"].get<std::vector<std::string>>();
  for (const auto& m : j["miners"]) {
    OccModel::Miner miner;
    miner.delta = m["delta"].get<double>();
    miner.prototypes = m["prototypes"].get<std::vector<std::vector<double>>>();
    model.miners.push_back(std::move(miner));
  }
  if (model.miners.empty()) throw InvalidConfig("model has no miners");
  return model;
}

void save_occ_model(const OccModel& model, const std::string& path) {
  std::ofstream file(path, std::ios::trunc);
  if (!file) throw IoFailure("cannot write model: " + path);
  file << occ_model_to_json(model) << '\n';
  if (!file) throw IoFailure("short write: " + path);
}

OccModel load_occ_model(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw IoFailure("cannot open model: " + path);
  std::stringstream ss;
  ss << file.rdbuf();
  return occ_model_from_json(ss.str());
}

}  // namespace gearsound
