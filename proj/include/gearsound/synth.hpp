#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "gearsound/gearbox.hpp"
#include "gearsound/time_signal.hpp"

namespace gearsound {

enum class NoiseKind {
  none,
  hammering,
  air_pressure,
  electric_wrench,
  speech,
  music,
  ventilation,
};

NoiseKind noise_kind_from_string(const std::string& name);
const char* noise_kind_name(NoiseKind kind);

// Contamination added on top of the motor signal. level_db_rel is the gain
// of the noise RMS relative to the motor base RMS; window_s, when present,
// restricts the noise to [start, end] within the signal duration.
struct NoiseSpec {
  NoiseKind kind = NoiseKind::none;
  double level_db_rel = 0.0;
  std::optional<std::pair<double, double>> window_s;
};

enum class HealthState { healthy, minor_fault, major_fault };

HealthState health_from_string(const std::string& name);
const char* health_name(HealthState h);

// Parameters of one synthetic geared-motor recording. impulse_gain scales
// the fault impulse amplitude relative to the motor base RMS and must be
// zero exactly when health == healthy.
struct SyntheticMotorSpec {
  GearGeometry geometry;
  HealthState health = HealthState::healthy;
  double resonance_hz = 3000.0;  // structural resonance excited by impacts
  double impulse_gain = 0.0;
  double speed_jitter_rel = 0.01;
  bool include_inverter_tone = true;
};

// Deterministic for fixed arguments. The output is a stationary motor base
// (broadband floor, mesh tones, optional 8 kHz inverter tone) plus, for
// faulty specs, a train of exponentially damped sinusoids at resonance_hz
// repeating at the motor-shaft frequency with period jitter, plus the
// requested contamination.
TimeSignal synthesize_motor_sound(const SyntheticMotorSpec& spec,
                                  const NoiseSpec& noise, double duration_s,
                                  double sample_rate_hz, std::uint64_t seed);

}  // namespace gearsound
