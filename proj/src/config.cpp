#include "gearsound/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gearsound/toml.hpp"

namespace gearsound {

const char* feature_set_name(FeatureSet set) {
  switch (set) {
    case FeatureSet::nes: return "NES";
    case FeatureSet::ses: return "SES";
    case FeatureSet::les: return "LES";
    case FeatureSet::spa: return "SPA";
    case FeatureSet::tvpa: return "TVPA";
    case FeatureSet::les_tvpa: return "LES+TVPA";
  }
  return "?";
}

FeatureSet feature_set_from_string(const std::string& name) {
  std::string lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "nes") return FeatureSet::nes;
  if (lower == "ses") return FeatureSet::ses;
  if (lower == "les") return FeatureSet::les;
  if (lower == "spa") return FeatureSet::spa;
  if (lower == "tvpa") return FeatureSet::tvpa;
  if (lower == "les+tvpa" || lower == "les_tvpa") return FeatureSet::les_tvpa;
  throw InvalidConfig("unknown feature set: " + name);
}

std::vector<FeatureSet> all_feature_sets() {
  return {FeatureSet::nes, FeatureSet::ses,  FeatureSet::les,
          FeatureSet::spa, FeatureSet::tvpa, FeatureSet::les_tvpa};
}

void PipelineConfig::validate() const {
  if (!(band_low_hz > 0.0) || !(band_high_hz > band_low_hz) ||
      !(band_high_hz < dataset.sample_rate_hz / 2.0)) {
    throw InvalidConfig("analysis band must satisfy 0 < L < H < rate/2");
  }
  if (!(ff_min_hz >= 0.0)) throw InvalidConfig("ff_min_hz must be >= 0");
  if (!(ff_tolerance_rel > 0.0) || ff_tolerance_rel >= 1.0) {
    throw InvalidConfig("ff_tolerance_rel must lie in (0, 1)");
  }
  if (k_max < 1) throw InvalidConfig("k_max must be >= 1");
  if (feature_sets.empty()) throw InvalidConfig("no feature sets selected");
  dataset.geometry.validate();
}

PipelineConfig default_pipeline_config() {
  PipelineConfig config;
  config.digest = config_digest(canonical_config_toml(config));
  return config;
}

PipelineConfig load_pipeline_config(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoFailure("cannot open config: " + path);
  std::stringstream ss;
  ss << file.rdbuf();
  const std::string bytes = ss.str();
  const TomlTable toml = TomlTable::parse(bytes);

  PipelineConfig config;
  DatasetConfig& d = config.dataset;
  d.train_healthy = static_cast<int>(toml.get_int("dataset.train_healthy", d.train_healthy));
  d.train_minor = static_cast<int>(toml.get_int("dataset.train_minor", d.train_minor));
  d.test_healthy = static_cast<int>(toml.get_int("dataset.test_healthy", d.test_healthy));
  d.test_minor = static_cast<int>(toml.get_int("dataset.test_minor", d.test_minor));
  d.test_major = static_cast<int>(toml.get_int("dataset.test_major", d.test_major));
  d.noisy_test = static_cast<int>(toml.get_int("dataset.noisy_test", d.noisy_test));
  d.duration_s = toml.get_double("dataset.duration_s", d.duration_s);
  d.sample_rate_hz = toml.get_double("dataset.sample_rate_hz", d.sample_rate_hz);
  d.calibration_pa_per_fullscale = toml.get_double(
      "dataset.calibration_pa_per_fullscale", d.calibration_pa_per_fullscale);
  d.minor_gain_lo = toml.get_double("dataset.minor_gain_lo", d.minor_gain_lo);
  d.minor_gain_hi = toml.get_double("dataset.minor_gain_hi", d.minor_gain_hi);
  d.major_gain_lo = toml.get_double("dataset.major_gain_lo", d.major_gain_lo);
  d.major_gain_hi = toml.get_double("dataset.major_gain_hi", d.major_gain_hi);

  d.geometry.rated_speed_rpm =
      toml.get_double("gear.rated_speed_rpm", d.geometry.rated_speed_rpm);
  if (toml.contains("gear.teeth")) {
    d.geometry.teeth.clear();
    for (double t : toml.get_double_array("gear.teeth")) {
      d.geometry.teeth.push_back(static_cast<int>(t));
    }
  }

  config.band_low_hz = toml.get_double("pipeline.band_low_hz", config.band_low_hz);
  config.band_high_hz = toml.get_double("pipeline.band_high_hz", config.band_high_hz);
  config.ff_min_hz = toml.get_double("pipeline.ff_min_hz", config.ff_min_hz);
  config.ff_tolerance_rel =
      toml.get_double("pipeline.ff_tolerance_rel", config.ff_tolerance_rel);
  config.k_max = static_cast<int>(toml.get_int("pipeline.k_max", config.k_max));
  if (toml.contains("pipeline.feature_sets")) {
    config.feature_sets.clear();
    for (const auto& name : toml.get_string_array("pipeline.feature_sets")) {
      config.feature_sets.push_back(feature_set_from_string(name));
    }
  }

  config.occ.bag_count =
      static_cast<int>(toml.get_int("occ.bag_count", config.occ.bag_count));
  config.occ.prototype_fraction =
      toml.get_double("occ.prototype_fraction", config.occ.prototype_fraction);

  config.digest = config_digest(bytes);
  config.validate();
  return config;
}

std::string config_digest(const std::string& bytes) {
  std::uint64_t hash = 0xCBF29CE484222325ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001B3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

std::string canonical_config_toml(const PipelineConfig& config) {
  std::ostringstream out;
  const DatasetConfig& d = config.dataset;
  out << "[dataset]\n";
  out << "train_healthy = " << d.train_healthy << "\n";
  out << "train_minor = " << d.train_minor << "\n";
  out << "test_healthy = " << d.test_healthy << "\n";
  out << "test_minor = " << d.test_minor << "\n";
  out << "test_major = " << d.test_major << "\n";
  out << "noisy_test = " << d.noisy_test << "\n";
  char buf[64];
  auto num = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return std::string(buf);
  };
  out << "duration_s = " << num(d.duration_s) << "\n";
  out << "sample_rate_hz = " << num(d.sample_rate_hz) << "\n";
  out << "calibration_pa_per_fullscale = " << num(d.calibration_pa_per_fullscale) << "\n";
  out << "minor_gain_lo = " << num(d.minor_gain_lo) << "\n";
  out << "minor_gain_hi = " << num(d.minor_gain_hi) << "\n";
  out << "major_gain_lo = " << num(d.major_gain_lo) << "\n";
  out << "major_gain_hi = " << num(d.major_gain_hi) << "\n";
  out << "\n[gear]\n";
  out << "rated_speed_rpm = " << num(d.geometry.rated_speed_rpm) << "\n";
  out << "teeth = [";
  for (std::size_t i = 0; i < d.geometry.teeth.size(); ++i) {
    out << (i ? ", " : "") << d.geometry.teeth[i];
  }
  out << "]\n";
  out << "\n[pipeline]\n";
  out << "band_low_hz = " << num(config.band_low_hz) << "\n";
  out << "band_high_hz = " << num(config.band_high_hz) << "\n";
  out << "ff_min_hz = " << num(config.ff_min_hz) << "\n";
  out << "ff_tolerance_rel = " << num(config.ff_tolerance_rel) << "\n";
  out << "k_max = " << config.k_max << "\n";
  out << "feature_sets = [";
  for (std::size_t i = 0; i < config.feature_sets.size(); ++i) {
    out << (i ? ", " : "") << '"' << feature_set_name(config.feature_sets[i]) << '"';
  }
  out << "]\n";
  out << "\n[occ]\n";
  out << "bag_count = " << config.occ.bag_count << "\n";
  out << "prototype_fraction = " << num(config.occ.prototype_fraction) << "\n";
  return out.str();
}

}  // namespace gearsound
