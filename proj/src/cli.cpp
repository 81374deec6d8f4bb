#include "gearsound/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "gearsound/config.hpp"
#include "gearsound/dataset.hpp"
#include "gearsound/eval.hpp"
#include "gearsound/occ.hpp"
#include "gearsound/pipeline.hpp"

namespace gearsound {

namespace {

PipelineConfig config_from(const std::string& path) {
  return path.empty() ? default_pipeline_config() : load_pipeline_config(path);
}

std::string provenance(std::uint64_t seed, const PipelineConfig& config) {
  return "seed=" + std::to_string(seed) + " config_digest=" + config.digest;
}

void write_scores_csv(const std::vector<std::string>& ids,
                      const std::vector<double>& similarities, double threshold,
                      const std::string& path, const std::string& comment) {
  std::ofstream file(path, std::ios::trunc);
  if (!file) throw IoFailure("cannot write scores: " + path);
  const bool with_decision = threshold >= 0.0;
  file << "# " << comment << '\n'
       << (with_decision ? "id,similarity,accept\n" : "id,similarity\n");
  char buf[48];
  for (std::size_t i = 0; i < ids.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", similarities[i]);
    file << ids[i] << ',' << buf;
    if (with_decision) file << ',' << (similarities[i] >= threshold ? 1 : 0);
    file << '\n';
  }
  if (!file) throw IoFailure("short write: " + path);
}

struct ScoreFile {
  std::vector<std::string> ids;
  std::vector<double> similarities;
};

ScoreFile read_scores_csv(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw IoFailure("cannot open scores: " + path);
  ScoreFile out;
  std::string line;
  bool have_header = false;
  while (std::getline(file, line)) {
    if (line.empty() || line.front() == '#') continue;
    if (!have_header) {
      if (line != "id,similarity" && line != "id,similarity,accept") {
        throw InvalidConfig("unexpected score header");
      }
      have_header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw InvalidConfig("malformed score row: " + line);
    out.ids.push_back(line.substr(0, comma));
    out.similarities.push_back(std::stod(line.substr(comma + 1)));  // stops at any next comma
  }
  return out;
}

}  // namespace

int run_command(const std::vector<std::string>& args) {
  CLI::App app{"Acoustic geared-motor inspection toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_path, manifest_path, features_path, model_path,
      scores_path, feature_set_name_arg = "les+tvpa", mode = "f";
  std::uint64_t seed = 0;
  double threshold = -1.0;

  auto* generate = app.add_subcommand("generate", "Synthesize a dataset and manifest");
  generate->add_option("--config", config_path, "TOML config file");
  generate->add_option("--seed", seed, "Master seed");
  generate->add_option("--out", out_path, "Output directory")->required();

  auto* features = app.add_subcommand("features", "Extract one feature set to CSV");
  features->add_option("--config", config_path, "TOML config file");
  features->add_option("--manifest", manifest_path, "Dataset manifest")->required();
  features->add_option("--feature-set", feature_set_name_arg,
                       "nes|ses|les|spa|tvpa|les+tvpa");
  features->add_option("--seed", seed, "Echoed into the output header");
  features->add_option("--out", out_path, "Output CSV")->required();

  auto* train = app.add_subcommand("train", "Fit the one-class model on the train split");
  train->add_option("--config", config_path, "TOML config file");
  train->add_option("--features", features_path, "Feature CSV")->required();
  train->add_option("--seed", seed, "Model seed");
  train->add_option("--out", out_path, "Model JSON")->required();

  auto* score = app.add_subcommand("score", "Score feature rows against a model");
  score->add_option("--model", model_path, "Model JSON")->required();
  score->add_option("--features", features_path, "Feature CSV")->required();
  score->add_option("--threshold", threshold,
                    "Optional accept threshold; adds a column when set");
  score->add_option("--out", out_path, "Scores CSV")->required();

  auto* benchmark = app.add_subcommand("benchmark", "Full dataset + report reproduction");
  benchmark->add_option("--config", config_path, "TOML config file");
  benchmark->add_option("--seed", seed, "Master seed");
  benchmark->add_option("--out", out_path, "Output directory")->required();

  auto* roc = app.add_subcommand("roc", "ROC points from scores and a manifest");
  roc->add_option("--scores", scores_path, "Scores CSV")->required();
  roc->add_option("--manifest", manifest_path, "Dataset manifest")->required();
  roc->add_option("--mode", mode, "h (any fault positive) or f (major only)");
  roc->add_option("--out", out_path, "ROC CSV")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (generate->parsed()) {
      const PipelineConfig config = config_from(config_path);
      const auto samples = generate_dataset(config.dataset, seed, out_path);
      std::cout << "wrote " << samples.size() << " samples to " << out_path << " ("
                << provenance(seed, config) << ")\n";
    } else if (features->parsed()) {
      const PipelineConfig config = config_from(config_path);
      const FeatureSet set = feature_set_from_string(feature_set_name_arg);
      const auto manifest = read_manifest(manifest_path);
      const FeatureMatrix matrix = features_for_manifest(manifest, set, config);
      write_feature_csv(matrix, out_path,
                        provenance(seed, config) + " feature_set=" +
                            gearsound::feature_set_name(set));
      std::cout << "wrote " << matrix.rows.size() << " rows to " << out_path << '\n';
    } else if (train->parsed()) {
      const PipelineConfig config = config_from(config_path);
      const FeatureMatrix matrix = read_feature_csv(features_path);
      std::vector<std::vector<double>> rows;
      for (std::size_t i = 0; i < matrix.rows.size(); ++i) {
        if (matrix.splits[i] == Split::train) {
          if (matrix.labels[i] == HealthState::major_fault) {
            throw InvalidConfig("train split contains a major fault");
          }
          rows.push_back(matrix.rows[i]);
        }
      }
      BrmParams params = config.occ;
      params.seed = seed;
      OccModel model = fit_brm(rows, params);
      model.feature_names = matrix.feature_names;
      save_occ_model(model, out_path);
      std::cout << "trained on " << rows.size() << " rows (" << provenance(seed, config)
                << ")\n";
    } else if (score->parsed()) {
      const OccModel model = load_occ_model(model_path);
      const FeatureMatrix matrix = read_feature_csv(features_path);
      if (!model.feature_names.empty() &&
          model.feature_names != matrix.feature_names) {
        throw DimensionMismatch("model was trained on different features");
      }
      std::vector<double> similarities;
      similarities.reserve(matrix.rows.size());
      for (const auto& row : matrix.rows) similarities.push_back(score_brm(model, row));
      write_scores_csv(matrix.ids, similarities, threshold, out_path,
                       "model=" + model_path +
                           (threshold >= 0.0
                                ? " threshold=" + std::to_string(threshold)
                                : std::string()));
      std::cout << "scored " << similarities.size() << " rows\n";
    } else if (benchmark->parsed()) {
      const PipelineConfig config = config_from(config_path);
      std::filesystem::create_directories(out_path);
      const std::string dataset_dir =
          (std::filesystem::path(out_path) / "dataset").string();
      const auto manifest = generate_dataset(config.dataset, seed, dataset_dir);
      const BenchmarkReport report = benchmark_run(manifest, config, seed);
      write_benchmark_csv(report,
                          (std::filesystem::path(out_path) / "benchmark.csv").string());
      write_benchmark_json(report,
                           (std::filesystem::path(out_path) / "benchmark.json").string());
      for (const auto& row : report.rows) {
        std::cout << row.feature_set << ": auc_h=" << row.auc_h
                  << " auc_f=" << row.auc_f << '\n';
      }
      std::cout << provenance(seed, config) << '\n';
    } else if (roc->parsed()) {
      const ScoreFile scores = read_scores_csv(scores_path);
      const auto manifest = read_manifest(manifest_path);
      std::map<std::string, HealthState> label_of;
      for (const auto& s : manifest) label_of[s.id] = s.label;
      std::vector<double> fault_scores;
      std::vector<bool> positive;
      for (std::size_t i = 0; i < scores.ids.size(); ++i) {
        auto it = label_of.find(scores.ids[i]);
        if (it == label_of.end()) {
          throw InvalidConfig("scored id not in manifest: " + scores.ids[i]);
        }
        fault_scores.push_back(1.0 - scores.similarities[i]);
        positive.push_back(mode == "h" ? it->second != HealthState::healthy
                                       : it->second == HealthState::major_fault);
      }
      const RocCurve curve = roc_curve(fault_scores, positive);
      write_roc_csv(curve, out_path, "mode=" + mode + " scores=" + scores_path);
      std::cout << "auc=" << auc(curve) << '\n';
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace gearsound
