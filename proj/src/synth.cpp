#include "gearsound/synth.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "gearsound/errors.hpp"
#include "gearsound/rng.hpp"

namespace gearsound {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
// Motor base RMS in pascal (~60 dB SPL at the default calibration); noise
// levels and impulse gains are expressed relative to this.
constexpr double kBaseRms = 0.02;

double rms(const std::vector<double>& x, std::size_t lo, std::size_t hi) {
  double acc = 0.0;
  for (std::size_t i = lo; i < hi; ++i) acc += x[i] * x[i];
  const std::size_t n = hi > lo ? hi - lo : 1;
  return std::sqrt(acc / static_cast<double>(n));
}

void add_tone(std::vector<double>& out, double fs, double freq, double amp,
              double phase) {
  const double w = kTwoPi * freq / fs;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] += amp * std::sin(w * static_cast<double>(i) + phase);
  }
}

// One damped-sinusoid impact; rings out in well under 5 ms so individual
// impulses stay resolvable at shaft rates.
void add_impulse(std::vector<double>& out, double fs, double t0, double freq,
                 double amp) {
  constexpr double kDecayS = 0.0010;
  const auto start = static_cast<std::ptrdiff_t>(std::ceil(t0 * fs));
  const auto len = static_cast<std::ptrdiff_t>(5.0 * kDecayS * fs);
  for (std::ptrdiff_t i = start; i < start + len; ++i) {
    if (i < 0 || i >= static_cast<std::ptrdiff_t>(out.size())) continue;
    const double t = static_cast<double>(i) / fs - t0;
    out[static_cast<std::size_t>(i)] +=
        amp * std::exp(-t / kDecayS) * std::sin(kTwoPi * freq * t);
  }
}

// A hammer-like strike: short broadband burst plus a rattling resonance.
// Shared by the deliberate hammering texture and the hall ambience, so the
// two differ in level and rate, not in character.
void add_strike(std::vector<double>& out, double fs, double t0, double ring_hz,
                double amp, Rng& rng) {
  const std::size_t n = out.size();
  const auto start = static_cast<std::size_t>(t0 * fs);
  const auto len = static_cast<std::size_t>(0.040 * fs);
  for (std::size_t i = start; i < std::min(n, start + len); ++i) {
    const double dt = static_cast<double>(i - start) / fs;
    const double env = std::exp(-dt / 0.006);
    out[i] += amp * env *
              (0.8 * rng.gaussian() + 1.6 * std::sin(kTwoPi * ring_hz * dt));
  }
}

std::vector<double> motor_base(const SyntheticMotorSpec& spec, std::size_t n,
                               double fs, Rng& rng) {
  std::vector<double> out(n, 0.0);

  // Broadband floor: white plus a leaky-integrated (low-tilted) component.
  // The level varies between units, like it does between real motors.
  const double floor_level = 0.55 * rng.uniform(0.7, 1.3);
  double leaky = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = rng.gaussian();
    leaky = 0.92 * leaky + 0.08 * w;
    out[i] = 0.35 * w + 2.2 * leaky;
  }
  const double floor_gain = floor_level * kBaseRms / rms(out, 0, n);
  for (auto& s : out) s *= floor_gain;

  // Mesh tones with a couple of harmonics.
  const std::vector<double> shafts = shaft_frequencies(spec.geometry);
  for (std::size_t s = 0; s < spec.geometry.stage_count(); ++s) {
    const double mesh = shafts[s] * static_cast<double>(spec.geometry.teeth[2 * s]);
    const double amp =
        0.55 * kBaseRms * rng.uniform(0.7, 1.3) / static_cast<double>(s + 1);
    add_tone(out, fs, mesh, amp, rng.uniform(0.0, kTwoPi));
    add_tone(out, fs, 2.0 * mesh, 0.4 * amp, rng.uniform(0.0, kTwoPi));
    add_tone(out, fs, 3.0 * mesh, 0.2 * amp, rng.uniform(0.0, kTwoPi));
  }

  if (spec.include_inverter_tone) {
    add_tone(out, fs, 8000.0, 0.5 * kBaseRms, rng.uniform(0.0, kTwoPi));
  }

  // Production-hall ambience, present in every recording: the same noise
  // families as the deliberate contaminations, at mild and widely varying
  // levels. Every training sample therefore already carries tool strikes,
  // hiss, hum and chatter; deliberate test noise differs mainly in level.
  const double duration = static_cast<double>(n) / fs;
  const double amb = kBaseRms * rng.uniform(0.25, 0.5);
  double bed = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    bed = 0.75 * bed + 0.25 * rng.gaussian();
    out[i] += amb * 0.9 * bed;
  }
  for (int h = 1; h <= 3; ++h) {
    add_tone(out, fs, 100.0 * h, amb * 0.4 / h, rng.uniform(0.0, kTwoPi));
  }
  if (rng.uniform() < 0.85) {  // tool strikes, near and far
    double t = rng.uniform(0.0, 1.0);
    while (t < duration) {
      add_strike(out, fs, t, rng.uniform(900.0, 4500.0), amb * rng.uniform(1.5, 5.0), rng);
      t += rng.uniform(0.3, 1.2);
    }
  }
  if (rng.uniform() < 0.7) {  // wrench-like gated AM tone
    const double carrier = rng.uniform(2200.0, 3200.0);
    const double mod = rng.uniform(38.0, 52.0);
    const double gain = amb * rng.uniform(0.5, 1.2);
    double t = rng.uniform(0.0, 2.0);
    while (t < duration) {
      const double on = rng.uniform(0.3, 0.8);
      const auto a = static_cast<std::size_t>(t * fs);
      const auto b = std::min(n, static_cast<std::size_t>((t + on) * fs));
      const double phase = rng.uniform(0.0, kTwoPi);
      for (std::size_t i = a; i < b; ++i) {
        const double tt = static_cast<double>(i) / fs;
        out[i] += gain * (1.0 + 0.8 * std::sin(kTwoPi * mod * tt)) *
                  (std::sin(kTwoPi * carrier * tt + phase) +
                   0.4 * std::sin(kTwoPi * 2.0 * carrier * tt));
      }
      t += on + rng.uniform(0.5, 1.5);
    }
  }
  if (rng.uniform() < 0.7) {  // air hiss bed
    const double gain = amb * rng.uniform(0.15, 0.5);
    double prev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double w = rng.gaussian();
      out[i] += gain * 0.7 * (w - prev);
      prev = w;
    }
  }
  if (rng.uniform() < 0.7) {  // ventilation rumble
    const double a = 1.0 - std::exp(-kTwoPi * 300.0 / fs);
    const double gain = amb * rng.uniform(0.5, 1.5);
    double y1 = 0.0, y2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      y1 += a * (rng.gaussian() - y1);
      y2 += a * (y1 - y2);
      out[i] += gain * 3.0 * y2;
    }
  }
  if (rng.uniform() < 0.5) {  // chatter: wandering mid tone
    const double base_hz = rng.uniform(300.0, 2600.0);
    const double gain = amb * rng.uniform(0.2, 0.6);
    const double wob = rng.uniform(2.0, 6.0);
    const double ph = rng.uniform(0.0, kTwoPi);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / fs;
      const double am = 0.5 + 0.5 * std::sin(kTwoPi * wob * t + ph);
      out[i] += gain * am * std::sin(kTwoPi * base_hz * (1.0 + 0.02 * std::sin(kTwoPi * 3.1 * t)) * t);
    }
  }
  return out;
}

void add_fault_impulses(std::vector<double>& out, const SyntheticMotorSpec& spec,
                        double fs, Rng& rng) {
  const std::vector<double> shafts = shaft_frequencies(spec.geometry);
  const double rep_hz = shafts.front();        // impacts once per motor-shaft turn
  const double load_hz = shafts.back();        // slow load modulation
  const double period = 1.0 / rep_hz;
  const double duration = static_cast<double>(out.size()) / fs;
  const double load_phase = rng.uniform(0.0, kTwoPi);

  double t = rng.uniform(0.0, period);
  while (t < duration) {
    const double load = 1.0 + 0.7 * std::sin(kTwoPi * load_hz * t + load_phase);
    const double amp_jitter = 1.0 + 0.30 * (2.0 * rng.uniform() - 1.0);
    add_impulse(out, fs, t, spec.resonance_hz,
                spec.impulse_gain * kBaseRms * load * amp_jitter);
    t += period * (1.0 + spec.speed_jitter_rel * (2.0 * rng.uniform() - 1.0));
  }
}

std::vector<double> noise_texture(NoiseKind kind, std::size_t n, double fs,
                                  Rng& rng) {
  std::vector<double> out(n, 0.0);
  const double duration = static_cast<double>(n) / fs;
  switch (kind) {
    case NoiseKind::none:
      break;
    case NoiseKind::hammering: {
      // Sparse heavy strikes.
      double t = 0.05 + 0.3 * rng.uniform();
      while (t < duration) {
        add_strike(out, fs, t, rng.uniform(900.0, 4500.0), 0.7 + 0.6 * rng.uniform(), rng);
        t += rng.uniform(0.25, 0.75);
      }
      break;
    }
    case NoiseKind::air_pressure: {
      // Hissing: differentiated white noise tilts the spectrum upward.
      double prev = 0.0, prev2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double w = rng.gaussian();
        const double d1 = w - prev;
        out[i] = d1 - prev2;
        prev = w;
        prev2 = d1;
      }
      break;
    }
    case NoiseKind::electric_wrench: {
      // Amplitude-modulated tonal bursts.
      const double carrier = rng.uniform(2200.0, 3200.0);
      const double mod = rng.uniform(38.0, 52.0);
      const double phase = rng.uniform(0.0, kTwoPi);
      double burst_t = 0.1 + 0.2 * rng.uniform();
      std::vector<double> gate(n, 0.0);
      while (burst_t < duration) {
        const double on = rng.uniform(0.3, 0.7);
        const auto a = static_cast<std::size_t>(burst_t * fs);
        const auto b = std::min(n, static_cast<std::size_t>((burst_t + on) * fs));
        for (std::size_t i = a; i < b; ++i) gate[i] = 1.0;
        burst_t += on + rng.uniform(0.2, 0.5);
      }
      for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / fs;
        const double am = 1.0 + 0.8 * std::sin(kTwoPi * mod * t);
        out[i] = gate[i] * am *
                 (std::sin(kTwoPi * carrier * t + phase) +
                  0.4 * std::sin(kTwoPi * 2.0 * carrier * t));
      }
      break;
    }
    case NoiseKind::speech: {
      // Formant-like tones with syllabic amplitude wander, 100-4000 Hz.
      const double formants[4] = {240.0, 780.0, 1900.0, 2800.0};
      const double amps[4] = {1.0, 0.7, 0.4, 0.25};
      std::vector<double> syllable(n, 0.0);
      double level = 0.0;
      const double alpha = 1.0 - std::exp(-kTwoPi * 4.0 / fs);
      for (std::size_t i = 0; i < n; ++i) {
        if (i % static_cast<std::size_t>(0.12 * fs) == 0) {
          level = rng.uniform() < 0.3 ? 0.0 : rng.uniform(0.3, 1.0);
        }
        syllable[i] = (i == 0 ? level : syllable[i - 1] + alpha * (level - syllable[i - 1]));
      }
      for (int f = 0; f < 4; ++f) {
        const double wob = rng.uniform(2.0, 6.0);
        const double ph = rng.uniform(0.0, kTwoPi);
        for (std::size_t i = 0; i < n; ++i) {
          const double t = static_cast<double>(i) / fs;
          const double fm = formants[f] * (1.0 + 0.03 * std::sin(kTwoPi * wob * t));
          out[i] += amps[f] * syllable[i] * std::sin(kTwoPi * fm * t + ph);
        }
      }
      break;
    }
    case NoiseKind::music: {
      // Sustained chord with a slow beat, plus a little broadband.
      const double notes[5] = {220.0, 329.6, 440.0, 554.4, 659.3};
      for (double note : notes) {
        const double ph = rng.uniform(0.0, kTwoPi);
        add_tone(out, fs, note, 0.5, ph);
        add_tone(out, fs, 2.0 * note, 0.2, ph * 0.5);
      }
      const double beat = rng.uniform(1.5, 2.5);
      for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / fs;
        out[i] *= 0.6 + 0.4 * std::sin(kTwoPi * beat * t);
        out[i] += 0.05 * rng.gaussian();
      }
      break;
    }
    case NoiseKind::ventilation: {
      // Broadband rumble below ~500 Hz: cascaded one-pole low-passes.
      const double a = 1.0 - std::exp(-kTwoPi * 300.0 / fs);
      double y1 = 0.0, y2 = 0.0, y3 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double w = rng.gaussian();
        y1 += a * (w - y1);
        y2 += a * (y1 - y2);
        y3 += a * (y2 - y3);
        out[i] = y3;
      }
      break;
    }
  }
  return out;
}

}  // namespace

NoiseKind noise_kind_from_string(const std::string& name) {
  if (name == "none") return NoiseKind::none;
  if (name == "hammering") return NoiseKind::hammering;
  if (name == "air_pressure") return NoiseKind::air_pressure;
  if (name == "electric_wrench") return NoiseKind::electric_wrench;
  if (name == "speech") return NoiseKind::speech;
  if (name == "music") return NoiseKind::music;
  if (name == "ventilation") return NoiseKind::ventilation;
  throw InvalidConfig("unknown noise kind: " + name);
}

const char* noise_kind_name(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::none: return "none";
    case NoiseKind::hammering: return "hammering";
    case NoiseKind::air_pressure: return "air_pressure";
    case NoiseKind::electric_wrench: return "electric_wrench";
    case NoiseKind::speech: return "speech";
    case NoiseKind::music: return "music";
    case NoiseKind::ventilation: return "ventilation";
  }
  return "none";
}

HealthState health_from_string(const std::string& name) {
  if (name == "healthy") return HealthState::healthy;
  if (name == "minor_fault") return HealthState::minor_fault;
  if (name == "major_fault") return HealthState::major_fault;
  throw InvalidConfig("unknown health state: " + name);
}

const char* health_name(HealthState h) {
  switch (h) {
    case HealthState::healthy: return "healthy";
    case HealthState::minor_fault: return "minor_fault";
    case HealthState::major_fault: return "major_fault";
  }
  return "healthy";
}

TimeSignal synthesize_motor_sound(const SyntheticMotorSpec& spec,
                                  const NoiseSpec& noise, double duration_s,
                                  double sample_rate_hz, std::uint64_t seed) {
  if (!(duration_s > 0.0) || !(sample_rate_hz > 0.0)) {
    throw InvalidSpec("duration and sample rate must be positive");
  }
  if (spec.resonance_hz < 850.0 || spec.resonance_hz > 5100.0) {
    throw InvalidSpec("resonance must lie in [850, 5100] Hz");
  }
  const bool healthy = spec.health == HealthState::healthy;
  if (healthy != (spec.impulse_gain == 0.0)) {
    throw InvalidSpec("impulse_gain must be zero exactly for healthy motors");
  }
  if (noise.window_s) {
    const auto [w0, w1] = *noise.window_s;
    if (!(w0 >= 0.0) || !(w1 <= duration_s) || !(w0 < w1)) {
      throw InvalidSpec("noise window must lie within the signal duration");
    }
  }

  const auto n = static_cast<std::size_t>(std::llround(duration_s * sample_rate_hz));
  const double fs = sample_rate_hz;

  // Independent sub-streams so the base texture does not shift when the
  // noise spec changes.
  Rng base_rng(derive_seed(seed, 1));
  Rng fault_rng(derive_seed(seed, 2));
  Rng noise_rng(derive_seed(seed, 3));

  std::vector<double> out = motor_base(spec, n, fs, base_rng);
  if (!healthy) add_fault_impulses(out, spec, fs, fault_rng);

  if (noise.kind != NoiseKind::none) {
    std::vector<double> tex = noise_texture(noise.kind, n, fs, noise_rng);
    std::size_t lo = 0, hi = n;
    if (noise.window_s) {
      lo = static_cast<std::size_t>(noise.window_s->first * fs);
      hi = std::min(n, static_cast<std::size_t>(noise.window_s->second * fs));
    }
    const double tex_rms = rms(tex, lo, hi);
    if (tex_rms > 0.0) {
      const double gain = kBaseRms * std::pow(10.0, noise.level_db_rel / 20.0) / tex_rms;
      const auto ramp = static_cast<std::size_t>(0.02 * fs);
      for (std::size_t i = lo; i < hi; ++i) {
        double gate = 1.0;
        if (noise.window_s) {
          if (i - lo < ramp) gate = static_cast<double>(i - lo) / static_cast<double>(ramp);
          if (hi - i <= ramp) {
            gate = std::min(gate, static_cast<double>(hi - i) / static_cast<double>(ramp));
          }
        }
        out[i] += gain * gate * tex[i];
      }
    }
  }

  TimeSignal signal;
  signal.samples = std::move(out);
  signal.sample_rate_hz = fs;
  signal.calibration_pa_per_fullscale = 1.0;
  return signal;
}

}  // namespace gearsound
