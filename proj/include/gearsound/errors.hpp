#pragma once

#include <stdexcept>
#include <string>

namespace gearsound {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// WAV ingestion / emission
struct UnsupportedChannels : Error { using Error::Error; };
struct UnsupportedEncoding : Error { using Error::Error; };
struct CorruptHeader : Error { using Error::Error; };
struct IoFailure : Error { using Error::Error; };

// Generators
struct InvalidSpec : Error { using Error::Error; };
struct InvalidConfig : Error { using Error::Error; };

// Filtering / spectra
struct InvalidCutoffs : Error { using Error::Error; };
struct SignalTooShort : Error { using Error::Error; };
struct SeriesTooShort : Error { using Error::Error; };
struct SpectrumTooNarrow : Error { using Error::Error; };

// Statistics
struct ZeroMean : Error { using Error::Error; };
struct TooFewValues : Error { using Error::Error; };
struct DegenerateVariance : Error { using Error::Error; };

// Classification / evaluation
struct EmptyTrainingSet : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct SingleClassInput : Error { using Error::Error; };
struct DegenerateInput : Error { using Error::Error; };

}  // namespace gearsound
