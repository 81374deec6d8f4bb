#include "gearsound/fft.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace gearsound::fft {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Precomputed per-length tables for the power-of-two kernel.
struct Pow2Plan {
  std::size_t n = 0;
  std::vector<std::size_t> bitrev;
  std::vector<std::complex<double>> twiddles;  // kTwoPi * k / n, forward sign

  explicit Pow2Plan(std::size_t length) : n(length) {
    bitrev.resize(n);
    std::size_t log2n = 0;
    while ((std::size_t{1} << log2n) < n) ++log2n;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t r = 0;
      for (std::size_t b = 0; b < log2n; ++b) {
        r = (r << 1) | ((i >> b) & 1u);
      }
      bitrev[i] = r;
    }
    twiddles.resize(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
      const double ang = -kTwoPi * static_cast<double>(k) / static_cast<double>(n);
      twiddles[k] = {std::cos(ang), std::sin(ang)};
    }
  }
};

// Chirp-z tables for one arbitrary length.
struct BluesteinPlan {
  std::size_t n = 0;
  std::size_t m = 0;  // power-of-two convolution length >= 2n-1
  std::vector<std::complex<double>> chirp;      // exp(-i*pi*k^2/n), k in [0, n)
  std::vector<std::complex<double>> chirp_fft;  // FFT of the symmetric chirp filter
};

std::shared_ptr<const Pow2Plan> pow2_plan(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, std::shared_ptr<const Pow2Plan>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  auto plan = std::make_shared<const Pow2Plan>(n);
  cache[n] = plan;
  return plan;
}

void fft_pow2(std::vector<std::complex<double>>& a, bool inverse_transform) {
  const std::size_t n = a.size();
  if (n <= 1) return;
  const auto plan = pow2_plan(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = plan->bitrev[i];
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len >> 1;
    const std::size_t step = n / len;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        std::complex<double> w = plan->twiddles[k * step];
        if (inverse_transform) w = std::conj(w);
        const std::complex<double> u = a[start + k];
        const std::complex<double> v = a[start + k + half] * w;
        a[start + k] = u + v;
        a[start + k + half] = u - v;
      }
    }
  }
  if (inverse_transform) {
    const double inv = 1.0 / static_cast<double>(n);
    for (auto& z : a) z *= inv;
  }
}

std::shared_ptr<const BluesteinPlan> bluestein_plan(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, std::shared_ptr<const BluesteinPlan>> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
  }
  auto plan = std::make_shared<BluesteinPlan>();
  plan->n = n;
  plan->m = next_pow2(2 * n - 1);
  plan->chirp.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    // k^2 mod 2n keeps the angle argument small for long transforms.
    const std::size_t k2 = (k * k) % (2 * n);
    const double ang = -kTwoPi * static_cast<double>(k2) / (2.0 * static_cast<double>(n));
    plan->chirp[k] = {std::cos(ang), std::sin(ang)};
  }
  plan->chirp_fft.assign(plan->m, {0.0, 0.0});
  plan->chirp_fft[0] = std::conj(plan->chirp[0]);
  for (std::size_t k = 1; k < n; ++k) {
    plan->chirp_fft[k] = std::conj(plan->chirp[k]);
    plan->chirp_fft[plan->m - k] = std::conj(plan->chirp[k]);
  }
  fft_pow2(plan->chirp_fft, false);

  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  cache[n] = plan;
  return plan;
}

void fft_bluestein(std::vector<std::complex<double>>& a, bool inverse_transform) {
  const std::size_t n = a.size();
  const auto plan = bluestein_plan(n);
  std::vector<std::complex<double>> buf(plan->m, {0.0, 0.0});
  for (std::size_t k = 0; k < n; ++k) {
    const std::complex<double> c =
        inverse_transform ? std::conj(plan->chirp[k]) : plan->chirp[k];
    buf[k] = a[k] * c;
  }
  fft_pow2(buf, false);
  if (inverse_transform) {
    for (std::size_t k = 0; k < plan->m; ++k) buf[k] *= std::conj(plan->chirp_fft[k]);
  } else {
    for (std::size_t k = 0; k < plan->m; ++k) buf[k] *= plan->chirp_fft[k];
  }
  fft_pow2(buf, true);
  for (std::size_t k = 0; k < n; ++k) {
    const std::complex<double> c =
        inverse_transform ? std::conj(plan->chirp[k]) : plan->chirp[k];
    a[k] = buf[k] * c;
  }
  if (inverse_transform) {
    const double inv = 1.0 / static_cast<double>(n);
    for (auto& z : a) z *= inv;
  }
}

}  // namespace

void transform(std::vector<std::complex<double>>& data, bool inverse) {
  const std::size_t n = data.size();
  if (n <= 1) return;
  if ((n & (n - 1)) == 0) {
    fft_pow2(data, inverse);
  } else {
    fft_bluestein(data, inverse);
  }
}

std::vector<std::complex<double>> forward_real(const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (n < 2 || n % 2 != 0) {
    std::vector<std::complex<double>> data(n);
    for (std::size_t i = 0; i < n; ++i) data[i] = {x[i], 0.0};
    transform(data, false);
    return data;
  }

  // Even length: pack adjacent pairs into one half-size complex transform.
  const std::size_t half = n / 2;
  std::vector<std::complex<double>> z(half);
  for (std::size_t m = 0; m < half; ++m) z[m] = {x[2 * m], x[2 * m + 1]};
  transform(z, false);

  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k <= half / 2; ++k) {
    const std::complex<double> zk = z[k];
    const std::complex<double> zr = std::conj(z[(half - k) % half]);
    const std::complex<double> even = 0.5 * (zk + zr);
    const std::complex<double> odd = std::complex<double>{0.0, -0.5} * (zk - zr);
    const double ang = -kTwoPi * static_cast<double>(k) / static_cast<double>(n);
    const std::complex<double> w{std::cos(ang), std::sin(ang)};
    out[k] = even + w * odd;
    // Mirror inside the half-spectrum: X[half - k] from the same pair.
    const std::complex<double> even2 = std::conj(even);
    const std::complex<double> odd2 = std::conj(odd);
    const double ang2 = -kTwoPi * static_cast<double>(half - k) / static_cast<double>(n);
    const std::complex<double> w2{std::cos(ang2), std::sin(ang2)};
    out[half - k] = even2 + w2 * odd2;
  }
  out[half] = {z[0].real() - z[0].imag(), 0.0};  // Nyquist of the packed pair
  for (std::size_t k = 1; k < half; ++k) out[n - k] = std::conj(out[k]);
  out[0] = {z[0].real() + z[0].imag(), 0.0};
  return out;
}

}  // namespace gearsound::fft
