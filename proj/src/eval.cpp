#include "gearsound/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "gearsound/occ.hpp"
#include "gearsound/rng.hpp"

namespace gearsound {

RocCurve roc_curve(const std::vector<double>& scores, const std::vector<bool>& labels) {
  if (scores.size() != labels.size()) {
    throw DimensionMismatch("scores and labels differ in length");
  }
  std::size_t positives = 0;
  for (bool l : labels) positives += l ? 1 : 0;
  const std::size_t negatives = labels.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw SingleClassInput("ROC needs both classes present");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });

  RocCurve curve;
  curve.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  std::size_t tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double s = scores[order[i]];
    while (i < order.size() && scores[order[i]] == s) {
      (labels[order[i]] ? tp : fp) += 1;
      ++i;
    }
    curve.points.push_back({static_cast<double>(fp) / static_cast<double>(negatives),
                            static_cast<double>(tp) / static_cast<double>(positives),
                            s});
  }
  return curve;
}

double auc(const RocCurve& curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& a = curve.points[i - 1];
    const auto& b = curve.points[i];
    area += (b.fpr - a.fpr) * (a.tpr + b.tpr) * 0.5;
  }
  return area;
}

BenchmarkReport benchmark_run(const std::vector<DatasetSample>& manifest,
                              const PipelineConfig& config, std::uint64_t seed) {
  bool have_train = false, have_test = false, train_major = false;
  for (const auto& s : manifest) {
    if (s.split == Split::train) {
      have_train = true;
      train_major |= s.label == HealthState::major_fault;
    } else {
      have_test = true;
    }
  }
  if (!have_train || !have_test) {
    throw InvalidConfig("benchmark needs both train and test splits");
  }
  if (train_major) {
    throw InvalidConfig("train split contains a major fault");
  }

  const auto matrices =
      feature_sets_for_manifest(manifest, config.feature_sets, config);

  BenchmarkReport report;
  report.seed = seed;
  report.config_digest = config.digest;
  for (std::size_t set_index = 0; set_index < config.feature_sets.size(); ++set_index) {
    const FeatureSet set = config.feature_sets[set_index];
    const FeatureMatrix& matrix = matrices.at(set);

    std::vector<std::vector<double>> train_rows;
    for (std::size_t i = 0; i < matrix.rows.size(); ++i) {
      if (matrix.splits[i] == Split::train) train_rows.push_back(matrix.rows[i]);
    }
    BrmParams params = config.occ;
    params.seed = derive_seed(seed, 100 + set_index);
    const OccModel model = fit_brm(train_rows, params);

    std::vector<double> fault_scores;
    std::vector<bool> pos_h, pos_f;
    for (std::size_t i = 0; i < matrix.rows.size(); ++i) {
      if (matrix.splits[i] != Split::test) continue;
      fault_scores.push_back(1.0 - score_brm(model, matrix.rows[i]));
      pos_h.push_back(matrix.labels[i] != HealthState::healthy);
      pos_f.push_back(matrix.labels[i] == HealthState::major_fault);
    }

    BenchmarkRow row;
    row.feature_set = feature_set_name(set);
    row.auc_h = auc(roc_curve(fault_scores, pos_h));
    row.auc_f = auc(roc_curve(fault_scores, pos_f));
    report.rows.push_back(std::move(row));
  }
  return report;
}

void write_benchmark_csv(const BenchmarkReport& report, const std::string& path) {
  std::ofstream file(path, std::ios::trunc);
  if (!file) throw IoFailure("cannot write report: " + path);
  file << "# seed=" << report.seed << " config_digest=" << report.config_digest << '\n';
  file << "feature_set,auc_h,auc_f\n";
  char buf[64];
  for (const auto& row : report.rows) {
    std::snprintf(buf, sizeof(buf), "%s,%.6f,%.6f", row.feature_set.c_str(),
                  row.auc_h, row.auc_f);
    file << buf << '\n';
  }
  if (!file) throw IoFailure("short write: " + path);
}

void write_benchmark_json(const BenchmarkReport& report, const std::string& path) {
  nlohmann::json j;
  j["seed"] = report.seed;
  j["config_digest"] = report.config_digest;
  j["rows"] = nlohmann::json::array();
  for (const auto& row : report.rows) {
    j["rows"].push_back({{"feature_set", row.feature_set},
                         {"auc_h", row.auc_h},
                         {"auc_f", row.auc_f}});
  }
  std::ofstream file(path, std::ios::trunc);
  if (!file) throw IoFailure("cannot write report: " + path);
  file << j.dump(2) << '\n';
  if (!file) throw IoFailure("short write: " + path);
}

void write_roc_csv(const RocCurve& curve, const std::string& path,
                   const std::string& provenance_comment) {
  std::ofstream file(path, std::ios::trunc);
  if (!file) throw IoFailure("cannot write ROC: " + path);
  if (!provenance_comment.empty()) file << "# " << provenance_comment << '\n';
  file << "fpr,tpr,threshold\n";
  char buf[96];
  for (const auto& p : curve.points) {
    std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g", p.fpr, p.tpr, p.threshold);
    file << buf << '\n';
  }
  if (!file) throw IoFailure("short write: " + path);
}

double kendalls_w(const std::vector<std::vector<double>>& rankings) {
  const std::size_t m = rankings.size();
  if (m < 2) throw DegenerateInput("need at least two rankers");
  const std::size_t n = rankings.front().size();
  if (n < 2) throw DegenerateInput("need at least two items");
  for (const auto& r : rankings) {
    if (r.size() != n) throw DimensionMismatch("rankers rated different item counts");
  }

  // Mid-rank each ranker, accumulating the ties correction sum(t^3 - t).
  std::vector<double> rank_sums(n, 0.0);
  double ties_correction = 0.0;
  for (const auto& row : rankings) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return row[a] < row[b]; });
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j < n && row[order[j]] == row[order[i]]) ++j;
      const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);  // averaged 1-based
      for (std::size_t k = i; k < j; ++k) rank_sums[order[k]] += mid_rank;
      const auto t = static_cast<double>(j - i);
      ties_correction += t * t * t - t;
      i = j;
    }
  }

  const double mean_rank_sum =
      std::accumulate(rank_sums.begin(), rank_sums.end(), 0.0) / static_cast<double>(n);
  double s = 0.0;
  for (double r : rank_sums) s += (r - mean_rank_sum) * (r - mean_rank_sum);

  const double md = static_cast<double>(m);
  const double nd = static_cast<double>(n);
  const double denominator = md * md * (nd * nd * nd - nd) - md * ties_correction;
  if (!(denominator > 0.0)) {
    throw DegenerateInput("all items tied by all rankers");
  }
  return 12.0 * s / denominator;
}

HealthState aggregate_labels(const std::array<HealthState, 3>& votes) {
  int counts[3] = {0, 0, 0};
  for (HealthState v : votes) counts[static_cast<int>(v)] += 1;
  for (int i = 0; i < 3; ++i) {
    if (counts[i] >= 2) return static_cast<HealthState>(i);
  }
  return HealthState::minor_fault;  // three-way split -> median severity
}

}  // namespace gearsound
