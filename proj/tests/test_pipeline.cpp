#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include "gearsound/cli.hpp"
#include "gearsound/config.hpp"
#include "gearsound/dataset.hpp"
#include "gearsound/dsp.hpp"
#include "gearsound/eval.hpp"
#include "gearsound/occ.hpp"
#include "gearsound/pipeline.hpp"
#include "gearsound/psycho.hpp"
#include "gearsound/synth.hpp"

using namespace gearsound;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("gearsound_pipe_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string file_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Small-but-valid pipeline config: signals long enough for the loudness
// high-pass (> 2.25 s) and the band-pass preconditions.
PipelineConfig tiny_config() {
  PipelineConfig config = default_pipeline_config();
  config.dataset.train_healthy = 4;
  config.dataset.train_minor = 2;
  config.dataset.test_healthy = 3;
  config.dataset.test_minor = 2;
  config.dataset.test_major = 3;
  config.dataset.noisy_test = 4;
  config.dataset.duration_s = 2.5;
  return config;
}

TimeSignal synth_major(double duration_s) {
  SyntheticMotorSpec spec;
  spec.geometry = GearGeometry{1375.0, {16, 40, 12, 48}};
  spec.health = HealthState::major_fault;
  spec.impulse_gain = 4.0;
  spec.resonance_hz = 3000.0;
  return synthesize_motor_sound(spec, NoiseSpec{}, duration_s, 48000.0, 77);
}

}  // namespace

TEST_CASE("envelope feature sets carry the fault-frequency labels in order") {
  const PipelineConfig config = default_pipeline_config();
  const TimeSignal x = synth_major(2.5);
  const auto features = extract_features(x, FeatureSet::les, config);
  const auto ffs = enumerate_fault_frequencies(config.dataset.geometry, config.k_max,
                                               config.ff_min_hz);
  REQUIRE(features.size() == ffs.size());
  for (std::size_t i = 0; i < ffs.size(); ++i) {
    CHECK(features.names[i] == "LES_" + ffs.entries[i].label);
  }
}

TEST_CASE("the combined set is the LES block followed by the TVPA block") {
  const PipelineConfig config = default_pipeline_config();
  const TimeSignal x = synth_major(2.5);
  const auto sets = extract_feature_sets(
      x, {FeatureSet::les, FeatureSet::tvpa, FeatureSet::les_tvpa}, config);
  const auto& les = sets.at(FeatureSet::les);
  const auto& tvpa = sets.at(FeatureSet::tvpa);
  const auto& combined = sets.at(FeatureSet::les_tvpa);
  REQUIRE(combined.size() == les.size() + tvpa.size());
  for (std::size_t i = 0; i < les.size(); ++i) {
    CHECK(combined.names[i] == les.names[i]);
    CHECK(combined.values[i] == les.values[i]);
  }
  for (std::size_t i = 0; i < tvpa.size(); ++i) {
    CHECK(combined.names[les.size() + i] == tvpa.names[i]);
    CHECK(combined.values[les.size() + i] == tvpa.values[i]);
  }
}

TEST_CASE("pipeline psycho features equal the module on the band-passed signal") {
  const PipelineConfig config = default_pipeline_config();
  const TimeSignal x = synth_major(2.5);
  const auto sets =
      extract_feature_sets(x, {FeatureSet::spa, FeatureSet::tvpa}, config);

  const auto kernel = design_fir_window(config.band_low_hz, config.band_high_hz,
                                        x.sample_rate_hz, FilterKind::band_pass);
  const TimeSignal filtered = filter_zero_phase(x, kernel);
  const auto spa = spa_features(filtered);
  const auto tvpa = tvpa_features(filtered);
  for (std::size_t i = 0; i < spa.size(); ++i) {
    CHECK(sets.at(FeatureSet::spa).values[i] ==
          doctest::Approx(spa.values[i]).epsilon(1e-12));
  }
  for (std::size_t i = 0; i < tvpa.size(); ++i) {
    CHECK(sets.at(FeatureSet::tvpa).values[i] ==
          doctest::Approx(tvpa.values[i]).epsilon(1e-12));
  }
}

TEST_CASE("feature CSV round-trips through write and read") {
  FeatureMatrix matrix;
  matrix.feature_names = {"f1", "f2"};
  matrix.ids = {"a", "b"};
  matrix.labels = {HealthState::healthy, HealthState::major_fault};
  matrix.splits = {Split::train, Split::test};
  matrix.rows = {{1.25, -3.5e-9}, {0.0, 7.125}};
  const auto dir = temp_dir("csv");
  const std::string path = (dir / "features.csv").string();
  write_feature_csv(matrix, path, "seed=1 config_digest=abc");
  const FeatureMatrix reread = read_feature_csv(path);
  CHECK(reread.feature_names == matrix.feature_names);
  CHECK(reread.ids == matrix.ids);
  CHECK(reread.rows == matrix.rows);
  std::filesystem::remove_all(dir);
}

TEST_CASE("benchmark on a small dataset is deterministic and well-formed") {
  const auto dir = temp_dir("bench_small");
  const PipelineConfig config = tiny_config();
  const auto manifest = generate_dataset(config.dataset, 5, dir.string());
  const BenchmarkReport a = benchmark_run(manifest, config, 5);
  const BenchmarkReport b = benchmark_run(manifest, config, 5);
  REQUIRE(a.rows.size() == 6);
  const std::vector<std::string> expected_order = {"NES", "SES", "LES",
                                                   "SPA", "TVPA", "LES+TVPA"};
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].feature_set == expected_order[i]);
    CHECK(a.rows[i].auc_h >= 0.0);
    CHECK(a.rows[i].auc_h <= 1.0);
    CHECK(a.rows[i].auc_f >= 0.0);
    CHECK(a.rows[i].auc_f <= 1.0);
    CHECK(a.rows[i].auc_h == b.rows[i].auc_h);
    CHECK(a.rows[i].auc_f == b.rows[i].auc_f);
  }
  // Directional sanity: held-out healthy samples look more healthy-like
  // than majors.
  const auto les = features_for_manifest(manifest, FeatureSet::les, config);
  std::vector<std::vector<double>> train_rows;
  for (std::size_t i = 0; i < les.rows.size(); ++i) {
    if (les.splits[i] == Split::train) train_rows.push_back(les.rows[i]);
  }
  BrmParams params = config.occ;
  params.seed = 5;
  const OccModel model = fit_brm(train_rows, params);
  double healthy_mean = 0.0, major_mean = 0.0;
  int healthy_count = 0, major_count = 0;
  for (std::size_t i = 0; i < les.rows.size(); ++i) {
    if (les.splits[i] != Split::test) continue;
    if (les.labels[i] == HealthState::healthy) {
      healthy_mean += score_brm(model, les.rows[i]);
      ++healthy_count;
    } else if (les.labels[i] == HealthState::major_fault) {
      major_mean += score_brm(model, les.rows[i]);
      ++major_count;
    }
  }
  CHECK(healthy_mean / healthy_count > major_mean / major_count);
  std::filesystem::remove_all(dir);
}

TEST_CASE("each TVPA feature separates majors from healthy on clean data") {
  // Rank-sum check of the separability premise, on a clean-contrast set
  // (no deliberate noise): one-sided at alpha = 0.05, majors high.
  const auto dir = temp_dir("tvpa_premise");
  PipelineConfig config = default_pipeline_config();
  config.dataset.train_healthy = 1;
  config.dataset.train_minor = 0;
  config.dataset.test_healthy = 25;
  config.dataset.test_minor = 0;
  config.dataset.test_major = 25;
  config.dataset.noisy_test = 0;
  config.dataset.duration_s = 3.0;
  const auto manifest = generate_dataset(config.dataset, 42, dir.string());
  const FeatureMatrix matrix = features_for_manifest(manifest, FeatureSet::tvpa, config);

  for (std::size_t f = 0; f < matrix.feature_names.size(); ++f) {
    std::vector<double> healthy, major;
    for (std::size_t i = 0; i < matrix.rows.size(); ++i) {
      if (matrix.splits[i] != Split::test) continue;
      (matrix.labels[i] == HealthState::major_fault ? major : healthy)
          .push_back(matrix.rows[i][f]);
    }
    double u = 0.0;
    for (double a : major) {
      for (double b : healthy) u += a > b ? 1.0 : (a == b ? 0.5 : 0.0);
    }
    const double n1 = static_cast<double>(major.size());
    const double n2 = static_cast<double>(healthy.size());
    const double z = (u - n1 * n2 / 2.0) / std::sqrt(n1 * n2 * (n1 + n2 + 1.0) / 12.0);
    INFO(matrix.feature_names[f], " z=", z);
    CHECK(z > 1.645);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("the command line drives the whole pipeline") {
  const auto dir = temp_dir("cli");
  const std::string config_path = (dir / "config.toml").string();
  {
    PipelineConfig config = tiny_config();
    std::ofstream(config_path) << canonical_config_toml(config);
  }
  const std::string data_dir = (dir / "data").string();

  CHECK(run_command({"generate", "--config", config_path, "--seed", "3",
                     "--out", data_dir}) == 0);
  const auto manifest = read_manifest(data_dir + "/manifest.csv");
  CHECK(manifest.size() == 14);

  const std::string les_csv = (dir / "les.csv").string();
  CHECK(run_command({"features", "--config", config_path, "--manifest",
                     data_dir + "/manifest.csv", "--feature-set", "les",
                     "--seed", "3", "--out", les_csv}) == 0);
  const FeatureMatrix les = read_feature_csv(les_csv);
  CHECK(les.rows.size() == 14);

  const std::string model_path = (dir / "model.json").string();
  CHECK(run_command({"train", "--config", config_path, "--features", les_csv,
                     "--seed", "3", "--out", model_path}) == 0);

  const std::string scores_csv = (dir / "scores.csv").string();
  CHECK(run_command({"score", "--model", model_path, "--features", les_csv,
                     "--out", scores_csv}) == 0);
  const std::string thresholded_csv = (dir / "scores_thr.csv").string();
  CHECK(run_command({"score", "--model", model_path, "--features", les_csv,
                     "--threshold", "0.5", "--out", thresholded_csv}) == 0);
  CHECK(file_text(thresholded_csv).find("id,similarity,accept") != std::string::npos);

  const std::string roc_csv = (dir / "roc.csv").string();
  CHECK(run_command({"roc", "--scores", scores_csv, "--manifest",
                     data_dir + "/manifest.csv", "--mode", "f", "--out",
                     roc_csv}) == 0);
  const std::string roc_text = file_text(roc_csv);
  CHECK(roc_text.find("fpr,tpr,threshold") != std::string::npos);

  // Scoring with a model trained on a different feature set is a data error.
  const std::string spa_csv = (dir / "spa.csv").string();
  CHECK(run_command({"features", "--config", config_path, "--manifest",
                     data_dir + "/manifest.csv", "--feature-set", "spa",
                     "--seed", "3", "--out", spa_csv}) == 0);
  CHECK(run_command({"score", "--model", model_path, "--features", spa_csv,
                     "--out", (dir / "bad.csv").string()}) == 2);

  // Usage errors exit with 1.
  CHECK(run_command({"nonsense"}) == 1);
  CHECK(run_command({"score", "--model", model_path}) == 1);
  // Missing inputs exit with 2.
  CHECK(run_command({"score", "--model", (dir / "missing.json").string(),
                     "--features", les_csv, "--out",
                     (dir / "x.csv").string()}) == 2);
  std::filesystem::remove_all(dir);
}

TEST_CASE("benchmark runs are byte-identical for a fixed config and seed") {
  const auto dir = temp_dir("cli_bench");
  const std::string config_path = (dir / "config.toml").string();
  {
    PipelineConfig config = tiny_config();
    std::ofstream(config_path) << canonical_config_toml(config);
  }
  const std::string out1 = (dir / "run1").string();
  const std::string out2 = (dir / "run2").string();
  CHECK(run_command({"benchmark", "--config", config_path, "--seed", "11",
                     "--out", out1}) == 0);
  CHECK(run_command({"benchmark", "--config", config_path, "--seed", "11",
                     "--out", out2}) == 0);
  CHECK(file_text(out1 + "/benchmark.csv") == file_text(out2 + "/benchmark.csv"));
  CHECK(file_text(out1 + "/benchmark.json") == file_text(out2 + "/benchmark.json"));
  CHECK(!file_text(out1 + "/benchmark.csv").empty());
  std::filesystem::remove_all(dir);
}
