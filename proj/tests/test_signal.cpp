#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <vector>

#include "gearsound/dataset.hpp"
#include "gearsound/dsp.hpp"
#include "gearsound/envelope.hpp"
#include "gearsound/rng.hpp"
#include "gearsound/synth.hpp"
#include "gearsound/wav_io.hpp"
#include "test_util.hpp"

using namespace gearsound;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("gearsound_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::vector<char> file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

const GearGeometry kGeometry{1375.0, {16, 40, 12, 48}};

}  // namespace

TEST_CASE("float32 WAV round-trip is lossless to 1e-6") {
  const auto dir = temp_dir("wav_f32");
  Rng rng(1);
  TimeSignal x;
  x.sample_rate_hz = 48000.0;
  x.samples.resize(4800);
  for (auto& v : x.samples) v = 0.9 * (2.0 * rng.uniform() - 1.0);
  const std::string path = (dir / "a.wav").string();
  save_wav(x, path, WavEncoding::float32);
  const TimeSignal y = load_wav(path);
  REQUIRE(y.samples.size() == x.samples.size());
  CHECK(y.sample_rate_hz == 48000.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < x.samples.size(); ++i) {
    worst = std::max(worst, std::abs(y.samples[i] - x.samples[i]));
  }
  CHECK(worst < 1e-6);
  std::filesystem::remove_all(dir);
}

TEST_CASE("16-bit round-trip of a full-scale sine stays within one step") {
  const auto dir = temp_dir("wav_pcm16");
  TimeSignal x;
  x.sample_rate_hz = 48000.0;
  x.samples = testutil::sine(440.0, 0.999, 4800, 48000.0);
  const std::string path = (dir / "a.wav").string();
  save_wav(x, path, WavEncoding::pcm16);
  const TimeSignal y = load_wav(path);
  double worst = 0.0;
  for (std::size_t i = 0; i < x.samples.size(); ++i) {
    worst = std::max(worst, std::abs(y.samples[i] - x.samples[i]));
  }
  CHECK(worst < std::pow(2.0, -15.0));
  std::filesystem::remove_all(dir);
}

TEST_CASE("24-bit round-trip stays within one step") {
  const auto dir = temp_dir("wav_pcm24");
  TimeSignal x;
  x.sample_rate_hz = 44100.0;
  x.samples = testutil::sine(997.0, 0.8, 4410, 44100.0);
  const std::string path = (dir / "a.wav").string();
  save_wav(x, path, WavEncoding::pcm24);
  const TimeSignal y = load_wav(path);
  CHECK(y.sample_rate_hz == 44100.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < x.samples.size(); ++i) {
    worst = std::max(worst, std::abs(y.samples[i] - x.samples[i]));
  }
  CHECK(worst < std::pow(2.0, -23.0));
  std::filesystem::remove_all(dir);
}

TEST_CASE("a 5 s 16-bit mono file at 48 kHz loads as 240000 samples") {
  const auto dir = temp_dir("wav_len");
  TimeSignal x;
  x.sample_rate_hz = 48000.0;
  x.samples.assign(240000, 0.25);
  const std::string path = (dir / "a.wav").string();
  save_wav(x, path, WavEncoding::pcm16);
  const TimeSignal y = load_wav(path);
  CHECK(y.samples.size() == 240000);
  CHECK(y.sample_rate_hz == 48000.0);
  CHECK(y.duration_s() == doctest::Approx(5.0));
  std::filesystem::remove_all(dir);
}

TEST_CASE("stereo files are rejected") {
  const auto dir = temp_dir("wav_stereo");
  const std::string path = (dir / "stereo.wav").string();
  // Hand-built 2-channel PCM16 file with a couple of frames.
  std::vector<unsigned char> bytes = {
      'R', 'I', 'F', 'F', 44, 0, 0, 0, 'W', 'A', 'V', 'E',
      'f', 'm', 't', ' ', 16, 0, 0, 0,
      1, 0,        // PCM
      2, 0,        // two channels
      0x80, 0xBB, 0, 0,   // 48000
      0x00, 0xEE, 2, 0,   // byte rate
      4, 0, 16, 0,
      'd', 'a', 't', 'a', 8, 0, 0, 0,
      1, 0, 2, 0, 3, 0, 4, 0};
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  out.close();
  CHECK_THROWS_AS(load_wav(path), UnsupportedChannels);
  std::filesystem::remove_all(dir);
}

TEST_CASE("corrupt and missing files raise the documented errors") {
  const auto dir = temp_dir("wav_bad");
  const std::string garbage = (dir / "garbage.wav").string();
  std::ofstream(garbage) << "definitely not a wav";
  CHECK_THROWS_AS(load_wav(garbage), CorruptHeader);
  CHECK_THROWS_AS(load_wav((dir / "missing.wav").string()), IoFailure);

  TimeSignal x;
  x.samples.assign(16, 0.0);
  CHECK_THROWS_AS(save_wav(x, ""), IoFailure);
  std::filesystem::remove_all(dir);
}

TEST_CASE("calibration scales loaded samples linearly") {
  const auto dir = temp_dir("wav_cal");
  TimeSignal x;
  x.sample_rate_hz = 48000.0;
  x.samples = testutil::sine(1000.0, 0.5, 4800, 48000.0);
  const std::string path = (dir / "a.wav").string();
  save_wav(x, path, WavEncoding::float32);
  const TimeSignal a = load_wav(path, 1.0);
  const TimeSignal b = load_wav(path, 2.0);
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    CHECK(b.samples[i] == doctest::Approx(2.0 * a.samples[i]).epsilon(1e-12));
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("a full-scale float sine stays within the calibration bound") {
  const auto dir = temp_dir("wav_full");
  TimeSignal x;
  x.sample_rate_hz = 48000.0;
  x.samples = testutil::sine(100.0, 1.0, 4800, 48000.0);
  const std::string path = (dir / "a.wav").string();
  save_wav(x, path, WavEncoding::float32);
  const double cal = 3.7;
  const TimeSignal y = load_wav(path, cal);
  for (double v : y.samples) {
    CHECK(std::abs(v) <= cal * (1.0 + 1e-7));
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("synthesis is a pure function of its arguments") {
  SyntheticMotorSpec spec;
  spec.geometry = kGeometry;
  spec.health = HealthState::minor_fault;
  spec.impulse_gain = 1.0;
  NoiseSpec noise;
  noise.kind = NoiseKind::speech;
  noise.level_db_rel = 3.0;
  const TimeSignal a = synthesize_motor_sound(spec, noise, 2.0, 48000.0, 99);
  const TimeSignal b = synthesize_motor_sound(spec, noise, 2.0, 48000.0, 99);
  CHECK(a.samples == b.samples);
  const TimeSignal c = synthesize_motor_sound(spec, noise, 2.0, 48000.0, 100);
  CHECK(a.samples != c.samples);
}

TEST_CASE("synthesis validates its parameters") {
  SyntheticMotorSpec spec;
  spec.geometry = kGeometry;
  spec.health = HealthState::major_fault;
  spec.impulse_gain = 3.0;
  spec.resonance_hz = 600.0;  // outside [850, 5100]
  NoiseSpec none;
  CHECK_THROWS_AS(synthesize_motor_sound(spec, none, 1.0, 48000.0, 1), InvalidSpec);

  spec.resonance_hz = 3000.0;
  spec.health = HealthState::healthy;  // healthy requires zero impulse gain
  CHECK_THROWS_AS(synthesize_motor_sound(spec, none, 1.0, 48000.0, 1), InvalidSpec);

  spec.impulse_gain = 0.0;
  NoiseSpec bad;
  bad.kind = NoiseKind::music;
  bad.window_s = {{0.5, 2.0}};  // beyond the 1 s duration
  CHECK_THROWS_AS(synthesize_motor_sound(spec, bad, 1.0, 48000.0, 1), InvalidSpec);
}

TEST_CASE("a major fault puts a strong envelope line at the shaft rate") {
  SyntheticMotorSpec spec;
  spec.geometry = kGeometry;
  spec.health = HealthState::major_fault;
  spec.impulse_gain = 3.0;
  spec.resonance_hz = 3000.0;
  NoiseSpec none;
  const TimeSignal x = synthesize_motor_sound(spec, none, 5.0, 48000.0, 42);
  const auto les = envelope_spectrum(x, EnvelopeKind::LES, 1150.0, 5100.0);
  const double f1 = 1375.0 / 60.0;
  const auto bin = static_cast<std::size_t>(std::llround(f1 / les.resolution_hz));
  double peak = 0.0;
  for (std::size_t k = bin - 1; k <= bin + 1; ++k) {
    peak = std::max(peak, les.magnitudes[k]);
  }
  std::vector<double> sorted(les.magnitudes.begin() + 1, les.magnitudes.end());
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double median = sorted[sorted.size() / 2];
  CHECK(10.0 * std::log10(peak / median) >= 10.0);
}

TEST_CASE("ventilation noise raises the sub-500 Hz band energy") {
  SyntheticMotorSpec spec;
  spec.geometry = kGeometry;
  spec.health = HealthState::healthy;
  spec.impulse_gain = 0.0;
  NoiseSpec none;
  NoiseSpec vent;
  vent.kind = NoiseKind::ventilation;
  vent.level_db_rel = 3.0;
  const TimeSignal clean = synthesize_motor_sound(spec, none, 2.0, 48000.0, 7);
  const TimeSignal noisy = synthesize_motor_sound(spec, vent, 2.0, 48000.0, 7);
  auto low_band_energy = [](const TimeSignal& s) {
    const auto spec2 = magnitude_spectrum(s.samples, s.sample_rate_hz);
    double acc = 0.0;
    for (std::size_t k = 1; k < spec2.magnitudes.size(); ++k) {
      if (spec2.frequencies_hz[k] >= 500.0) break;
      acc += spec2.magnitudes[k] * spec2.magnitudes[k];
    }
    return acc;
  };
  CHECK(low_band_energy(noisy) > low_band_energy(clean));
}

TEST_CASE("default dataset matches the documented composition") {
  const auto dir = temp_dir("dataset_default");
  DatasetConfig config;  // defaults
  config.duration_s = 5.0;
  const auto samples = generate_dataset(config, 42, dir.string());
  CHECK(samples.size() == 138);

  int train = 0, train_healthy = 0, train_minor = 0, test_major = 0, noisy = 0;
  for (const auto& s : samples) {
    if (s.split == Split::train) {
      ++train;
      CHECK(s.label != HealthState::major_fault);
      if (s.label == HealthState::healthy) ++train_healthy;
      if (s.label == HealthState::minor_fault) ++train_minor;
      CHECK(s.noise.kind == NoiseKind::none);
    } else {
      if (s.label == HealthState::major_fault) ++test_major;
      if (s.noise.kind != NoiseKind::none) ++noisy;
    }
  }
  CHECK(train == 56);
  CHECK(train_healthy == 31);
  CHECK(train_minor == 25);
  CHECK(test_major == 22);
  CHECK(noisy == 43);

  // Manifest round-trip.
  const auto reread = read_manifest((dir / "manifest.csv").string());
  REQUIRE(reread.size() == samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    CHECK(reread[i].id == samples[i].id);
    CHECK(reread[i].label == samples[i].label);
    CHECK(reread[i].noise.kind == samples[i].noise.kind);
    CHECK((reread[i].split == samples[i].split));
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("an all-zero config produces an empty manifest and no files") {
  const auto dir = temp_dir("dataset_empty");
  DatasetConfig config;
  config.train_healthy = config.train_minor = 0;
  config.test_healthy = config.test_minor = config.test_major = 0;
  config.noisy_test = 0;
  const auto samples = generate_dataset(config, 1, dir.string());
  CHECK(samples.empty());
  std::size_t wavs = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() == ".wav") ++wavs;
  }
  CHECK(wavs == 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("negative counts are rejected") {
  const auto dir = temp_dir("dataset_neg");
  DatasetConfig config;
  config.test_major = -1;
  CHECK_THROWS_AS(generate_dataset(config, 1, dir.string()), InvalidConfig);
  std::filesystem::remove_all(dir);
}

TEST_CASE("the same seed reproduces manifests and signal files byte for byte") {
  const auto dir1 = temp_dir("dataset_rep1");
  const auto dir2 = temp_dir("dataset_rep2");
  DatasetConfig config;
  config.train_healthy = 2;
  config.train_minor = 1;
  config.test_healthy = 2;
  config.test_minor = 1;
  config.test_major = 2;
  config.noisy_test = 3;
  config.duration_s = 1.0;
  const auto a = generate_dataset(config, 7, dir1.string());
  const auto b = generate_dataset(config, 7, dir2.string());
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(file_bytes(a[i].path) == file_bytes(b[i].path));
  }
  // A different seed must actually change the signals.
  const auto dir3 = temp_dir("dataset_rep3");
  const auto c = generate_dataset(config, 8, dir3.string());
  bool any_diff = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    any_diff |= file_bytes(a[i].path) != file_bytes(c[i].path);
  }
  CHECK(any_diff);
  std::filesystem::remove_all(dir1);
  std::filesystem::remove_all(dir2);
  std::filesystem::remove_all(dir3);
}

TEST_CASE("no generated split ever trains on a major fault") {
  Rng rng(606);
  for (int trial = 0; trial < 3; ++trial) {
    const auto dir = temp_dir("dataset_purity" + std::to_string(trial));
    DatasetConfig config;
    config.train_healthy = 1 + static_cast<int>(rng.uniform_index(3));
    config.train_minor = static_cast<int>(rng.uniform_index(3));
    config.test_healthy = static_cast<int>(rng.uniform_index(2));
    config.test_minor = static_cast<int>(rng.uniform_index(2));
    config.test_major = 1 + static_cast<int>(rng.uniform_index(2));
    config.noisy_test = 0;
    config.duration_s = 0.5;
    const auto samples = generate_dataset(config, rng.next_u64(), dir.string());
    for (const auto& s : samples) {
      if (s.split == Split::train) CHECK(s.label != HealthState::major_fault);
    }
    std::filesystem::remove_all(dir);
  }
}
