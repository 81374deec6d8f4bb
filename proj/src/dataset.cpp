#include "gearsound/dataset.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gearsound/errors.hpp"
#include "gearsound/rng.hpp"
#include "gearsound/wav_io.hpp"

namespace gearsound {

namespace {

const NoiseKind kNoiseCycle[6] = {
    NoiseKind::hammering,    NoiseKind::air_pressure, NoiseKind::electric_wrench,
    NoiseKind::ventilation,  NoiseKind::speech,       NoiseKind::music,
};

std::string format_level(double db) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", db);
  return buf;
}

}  // namespace

std::vector<DatasetSample> generate_dataset(const DatasetConfig& config,
                                            std::uint64_t seed,
                                            const std::string& out_dir) {
  if (config.train_healthy < 0 || config.train_minor < 0 ||
      config.test_healthy < 0 || config.test_minor < 0 || config.test_major < 0 ||
      config.noisy_test < 0) {
    throw InvalidConfig("sample counts must be non-negative");
  }
  const int test_total = config.test_healthy + config.test_minor + config.test_major;
  if (config.noisy_test > test_total) {
    throw InvalidConfig("noisy_test exceeds the test split size");
  }

  std::filesystem::create_directories(out_dir);

  struct Plan {
    HealthState label;
    Split split;
  };
  std::vector<Plan> plan;
  plan.reserve(static_cast<std::size_t>(config.total()));
  for (int i = 0; i < config.train_healthy; ++i)
    plan.push_back({HealthState::healthy, Split::train});
  for (int i = 0; i < config.train_minor; ++i)
    plan.push_back({HealthState::minor_fault, Split::train});
  for (int i = 0; i < config.test_healthy; ++i)
    plan.push_back({HealthState::healthy, Split::test});
  for (int i = 0; i < config.test_minor; ++i)
    plan.push_back({HealthState::minor_fault, Split::test});
  for (int i = 0; i < config.test_major; ++i)
    plan.push_back({HealthState::major_fault, Split::test});

  std::vector<DatasetSample> samples;
  samples.reserve(plan.size());
  int test_index = 0;
  int noisy_assigned = 0;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    Rng rng(derive_seed(seed, 1000 + i));

    DatasetSample sample;
    char id[32];
    std::snprintf(id, sizeof(id), "sample_%03zu", i + 1);
    sample.id = id;
    sample.path = (std::filesystem::path(out_dir) / (sample.id + ".wav")).string();
    sample.label = plan[i].label;
    sample.split = plan[i].split;

    SyntheticMotorSpec spec;
    spec.geometry = config.geometry;
    spec.health = sample.label;
    spec.resonance_hz = rng.uniform(1500.0, 4500.0);
    spec.speed_jitter_rel = 0.01;
    spec.include_inverter_tone = true;
    switch (sample.label) {
      case HealthState::healthy:
        spec.impulse_gain = 0.0;
        break;
      case HealthState::minor_fault:
        spec.impulse_gain = rng.uniform(config.minor_gain_lo, config.minor_gain_hi);
        break;
      case HealthState::major_fault:
        spec.impulse_gain = rng.uniform(config.major_gain_lo, config.major_gain_hi);
        break;
    }

    sample.noise.kind = NoiseKind::none;
    if (sample.split == Split::test && test_total > 0) {
      // Spread noisy_test samples evenly over the test split (Bresenham),
      // cycling through the noise kinds and a few level steps.
      const long long lhs = static_cast<long long>(test_index + 1) * config.noisy_test;
      const long long rhs = static_cast<long long>(test_index) * config.noisy_test;
      const bool noisy = lhs / test_total > rhs / test_total;
      if (noisy) {
        sample.noise.kind = kNoiseCycle[noisy_assigned % 6];
        // Tool noises hit harder than speech or music on a production floor.
        const double kind_offset[6] = {2.0, 2.0, -5.0, 2.0, -3.0, -3.0};
        const double levels[3] = {1.0, 4.0, 7.0};
        sample.noise.level_db_rel =
            levels[(noisy_assigned / 6) % 3] + kind_offset[noisy_assigned % 6];
        if (noisy_assigned % 4 == 3) {
          // Some contaminations only cover part of the record.
          sample.noise.window_s = {{0.2 * config.duration_s, 0.7 * config.duration_s}};
        }
        ++noisy_assigned;
      }
      ++test_index;
    }

    TimeSignal signal =
        synthesize_motor_sound(spec, sample.noise, config.duration_s,
                               config.sample_rate_hz, derive_seed(seed, 2000 + i));
    signal.calibration_pa_per_fullscale = config.calibration_pa_per_fullscale;
    save_wav(signal, sample.path, WavEncoding::float32);
    samples.push_back(std::move(sample));
  }

  write_manifest(samples, (std::filesystem::path(out_dir) / "manifest.csv").string());
  return samples;
}

void write_manifest(const std::vector<DatasetSample>& samples,
                    const std::string& path) {
  std::ofstream file(path, std::ios::trunc);
  if (!file) throw IoFailure("cannot write manifest: " + path);
  file << "id,path,label,noise_kind,noise_level_db,split\n";
  for (const auto& s : samples) {
    file << s.id << ',' << s.path << ',' << health_name(s.label) << ','
         << noise_kind_name(s.noise.kind) << ',' << format_level(s.noise.level_db_rel)
         << ',' << (s.split == Split::train ? "train" : "test") << '\n';
  }
  if (!file) throw IoFailure("short write: " + path);
}

std::vector<DatasetSample> read_manifest(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw IoFailure("cannot open manifest: " + path);
  std::string line;
  if (!std::getline(file, line) ||
      line != "id,path,label,noise_kind,noise_level_db,split") {
    throw InvalidConfig("unexpected manifest header in " + path);
  }
  std::vector<DatasetSample> samples;
  while (std::getline(file, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 6) throw InvalidConfig("malformed manifest row: " + line);
    DatasetSample s;
    s.id = fields[0];
    s.path = fields[1];
    s.label = health_from_string(fields[2]);
    s.noise.kind = noise_kind_from_string(fields[3]);
    s.noise.level_db_rel = std::stod(fields[4]);
    if (fields[5] == "train") {
      s.split = Split::train;
    } else if (fields[5] == "test") {
      s.split = Split::test;
    } else {
      throw InvalidConfig("unknown split: " + fields[5]);
    }
    if (s.split == Split::train && s.label == HealthState::major_fault) {
      throw InvalidConfig("train split may not contain major faults: " + s.id);
    }
    samples.push_back(std::move(s));
  }
  return samples;
}

}  // namespace gearsound
