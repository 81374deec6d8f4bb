#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace gearsound::fft {

// In-place complex FFT for any length >= 1 (radix-2 when the length is a
// power of two, Bluestein's chirp-z otherwise). Forward transform is
// unnormalized; the inverse divides by the length. Plans (twiddles, chirp
// sequences) are cached per length and shared across threads.
void transform(std::vector<std::complex<double>>& data, bool inverse);

inline void forward(std::vector<std::complex<double>>& data) {
  transform(data, false);
}
inline void inverse(std::vector<std::complex<double>>& data) {
  transform(data, true);
}

// Forward FFT of a real sequence; returns the full complex spectrum.
std::vector<std::complex<double>> forward_real(const std::vector<double>& x);

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace gearsound::fft
