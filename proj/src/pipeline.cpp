#include "gearsound/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>

#include "gearsound/dsp.hpp"
#include "gearsound/envelope.hpp"
#include "gearsound/gearbox.hpp"
#include "gearsound/psycho.hpp"
#include "gearsound/wav_io.hpp"

namespace gearsound {

namespace {

// Envelope spectrum from an already band-pass-filtered signal.
SpectrumBins envelope_spectrum_of_filtered(const std::vector<double>& filtered,
                                           double rate_hz, EnvelopeKind kind) {
  std::vector<double> env = analytic_envelope(filtered);
  switch (kind) {
    case EnvelopeKind::NES:
      break;
    case EnvelopeKind::SES:
      for (auto& e : env) e = e * e;
      break;
    case EnvelopeKind::LES: {
      for (auto& e : env) e = e * e;
      const double peak = *std::max_element(env.begin(), env.end());
      const double eps = 1e-12 * peak;
      if (peak == 0.0) {
        std::fill(env.begin(), env.end(), 0.0);
      } else {
        for (auto& e : env) e = std::log(e + eps);
      }
      break;
    }
  }
  const double mean =
      std::accumulate(env.begin(), env.end(), 0.0) / static_cast<double>(env.size());
  for (auto& e : env) e -= mean;
  SpectrumBins spec = magnitude_spectrum(env, rate_hz);
  if (kind != EnvelopeKind::NES) {
    for (auto& m : spec.magnitudes) m = m * m;
  }
  return spec;
}

FeatureVector prefixed(const char* prefix, const FeatureVector& features) {
  FeatureVector out;
  for (std::size_t i = 0; i < features.size(); ++i) {
    out.push(std::string(prefix) + "_" + features.names[i], features.values[i]);
  }
  return out;
}

unsigned worker_count() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : std::min(hw, 8u);
}

}  // namespace

std::map<FeatureSet, FeatureVector> extract_feature_sets(
    const TimeSignal& signal, const std::vector<FeatureSet>& sets,
    const PipelineConfig& config) {
  const bool wants_env =
      std::any_of(sets.begin(), sets.end(), [](FeatureSet s) {
        return s == FeatureSet::nes || s == FeatureSet::ses ||
               s == FeatureSet::les || s == FeatureSet::les_tvpa;
      });
  const bool wants_psycho =
      std::any_of(sets.begin(), sets.end(), [](FeatureSet s) {
        return s == FeatureSet::spa || s == FeatureSet::tvpa ||
               s == FeatureSet::les_tvpa;
      });

  // Both feature families work on the band-passed signal.
  const FilterKernel kernel =
      design_fir_window(config.band_low_hz, config.band_high_hz,
                        signal.sample_rate_hz, FilterKind::band_pass);
  TimeSignal filtered = signal;
  filtered.samples = filter_zero_phase(signal.samples, kernel);

  const FaultFrequencySet ffs = enumerate_fault_frequencies(
      config.dataset.geometry, config.k_max, config.ff_min_hz);

  std::map<EnvelopeKind, FeatureVector> envelope_features;
  if (wants_env) {
    auto need = [&](EnvelopeKind kind, FeatureSet direct) {
      return std::any_of(sets.begin(), sets.end(), [&](FeatureSet s) {
        return s == direct || (kind == EnvelopeKind::LES && s == FeatureSet::les_tvpa);
      });
    };
    for (EnvelopeKind kind :
         {EnvelopeKind::NES, EnvelopeKind::SES, EnvelopeKind::LES}) {
      const FeatureSet direct = kind == EnvelopeKind::NES   ? FeatureSet::nes
                                : kind == EnvelopeKind::SES ? FeatureSet::ses
                                                            : FeatureSet::les;
      if (!need(kind, direct)) continue;
      const SpectrumBins spec = envelope_spectrum_of_filtered(
          filtered.samples, signal.sample_rate_hz, kind);
      const FeatureVector raw =
          extract_expert_features(spec, ffs, config.ff_tolerance_rel);
      envelope_features[kind] = prefixed(envelope_kind_name(kind), raw);
    }
  }

  FeatureVector spa, tvpa;
  if (wants_psycho) {
    const LoudnessSeries loudness = timevarying_loudness(filtered);
    const RoughnessSeries roughness = timevarying_roughness(filtered);
    const FluctuationSeries fluct = timevarying_fluctuation(loudness);
    const auto mean = [](const std::vector<double>& v) {
      return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    };
    spa.push("spa_loudness", stationary_loudness(filtered).total_sone);
    spa.push("spa_roughness", mean(roughness.values));
    spa.push("spa_fluctuation", mean(fluct.values));
    tvpa.push("tvpa_loudness_impulse",
              impulse_factor(highpass_loudness(loudness).values));
    tvpa.push("tvpa_roughness_variance", variance(roughness.values));
    tvpa.push("tvpa_fluctuation_kurtosis", kurtosis(fluct.values));
  }

  std::map<FeatureSet, FeatureVector> out;
  for (FeatureSet set : sets) {
    switch (set) {
      case FeatureSet::nes:
        out[set] = envelope_features[EnvelopeKind::NES];
        break;
      case FeatureSet::ses:
        out[set] = envelope_features[EnvelopeKind::SES];
        break;
      case FeatureSet::les:
        out[set] = envelope_features[EnvelopeKind::LES];
        break;
      case FeatureSet::spa:
        out[set] = spa;
        break;
      case FeatureSet::tvpa:
        out[set] = tvpa;
        break;
      case FeatureSet::les_tvpa: {
        FeatureVector combined = envelope_features[EnvelopeKind::LES];
        combined.append(tvpa);
        out[set] = std::move(combined);
        break;
      }
    }
  }
  return out;
}

FeatureVector extract_features(const TimeSignal& signal, FeatureSet set,
                               const PipelineConfig& config) {
  return extract_feature_sets(signal, {set}, config).at(set);
}

std::map<FeatureSet, FeatureMatrix> feature_sets_for_manifest(
    const std::vector<DatasetSample>& manifest, const std::vector<FeatureSet>& sets,
    const PipelineConfig& config) {
  std::vector<std::map<FeatureSet, FeatureVector>> per_sample(manifest.size());
  std::vector<std::string> failures(manifest.size());

  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= manifest.size()) return;
      try {
        const TimeSignal signal = load_wav(
            manifest[i].path, config.dataset.calibration_pa_per_fullscale);
        per_sample[i] = extract_feature_sets(signal, sets, config);
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };
  const unsigned workers =
      std::min<unsigned>(worker_count(),
                         std::max<std::size_t>(manifest.size(), 1));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  for (std::size_t i = 0; i < manifest.size(); ++i) {
    if (!failures[i].empty()) {
      throw Error("sample " + manifest[i].id + ": " + failures[i]);
    }
  }

  std::map<FeatureSet, FeatureMatrix> out;
  for (FeatureSet set : sets) {
    FeatureMatrix matrix;
    for (std::size_t i = 0; i < manifest.size(); ++i) {
      const FeatureVector& features = per_sample[i].at(set);
      if (i == 0) matrix.feature_names = features.names;
      if (features.names != matrix.feature_names) {
        throw DimensionMismatch("inconsistent feature names across samples");
      }
      matrix.ids.push_back(manifest[i].id);
      matrix.labels.push_back(manifest[i].label);
      matrix.splits.push_back(manifest[i].split);
      matrix.rows.push_back(features.values);
    }
    out[set] = std::move(matrix);
  }
  return out;
}

FeatureMatrix features_for_manifest(const std::vector<DatasetSample>& manifest,
                                    FeatureSet set, const PipelineConfig& config) {
  return feature_sets_for_manifest(manifest, {set}, config).at(set);
}

void write_feature_csv(const FeatureMatrix& matrix, const std::string& path,
                       const std::string& provenance_comment) {
  std::ofstream file(path, std::ios::trunc);
  if (!file) throw IoFailure("cannot write features: " + path);
  if (!provenance_comment.empty()) file << "# " << provenance_comment << '\n';
  file << "id,label,split";
  for (const auto& name : matrix.feature_names) file << ',' << name;
  file << '\n';
  char buf[40];
  for (std::size_t i = 0; i < matrix.rows.size(); ++i) {
    file << matrix.ids[i] << ',' << health_name(matrix.labels[i]) << ','
         << (matrix.splits[i] == Split::train ? "train" : "test");
    for (double v : matrix.rows[i]) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      file << ',' << buf;
    }
    file << '\n';
  }
  if (!file) throw IoFailure("short write: " + path);
}

FeatureMatrix read_feature_csv(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw IoFailure("cannot open features: " + path);
  FeatureMatrix matrix;
  std::string line;
  bool have_header = false;
  while (std::getline(file, line)) {
    if (line.empty() || line.front() == '#') continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!have_header) {
      if (fields.size() < 4 || fields[0] != "id") {
        throw InvalidConfig("unexpected feature CSV header in " + path);
      }
      matrix.feature_names.assign(fields.begin() + 3, fields.end());
      have_header = true;
      continue;
    }
    if (fields.size() != matrix.feature_names.size() + 3) {
      throw InvalidConfig("malformed feature row in " + path);
    }
    matrix.ids.push_back(fields[0]);
    matrix.labels.push_back(health_from_string(fields[1]));
    matrix.splits.push_back(fields[2] == "train" ? Split::train : Split::test);
    std::vector<double> row(matrix.feature_names.size());
    for (std::size_t i = 0; i < row.size(); ++i) row[i] = std::stod(fields[i + 3]);
    matrix.rows.push_back(std::move(row));
  }
  if (!have_header) throw InvalidConfig("empty feature CSV: " + path);
  return matrix;
}

}  // namespace gearsound
