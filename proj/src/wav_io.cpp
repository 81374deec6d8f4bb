#include "gearsound/wav_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace gearsound {

namespace {

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xFF));
  out.push_back(static_cast<unsigned char>((v >> 8) & 0xFF));
  out.push_back(static_cast<unsigned char>((v >> 16) & 0xFF));
  out.push_back(static_cast<unsigned char>((v >> 24) & 0xFF));
}

void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xFF));
  out.push_back(static_cast<unsigned char>((v >> 8) & 0xFF));
}

}  // namespace

TimeSignal load_wav(const std::string& path, double calibration_pa_per_fullscale) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoFailure("cannot open " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(file)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw CorruptHeader("not a RIFF/WAVE file: " + path);
  }

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t sample_rate = 0;
  bool have_fmt = false;
  const unsigned char* data = nullptr;
  std::uint32_t data_size = 0;

  // Chunk scan; no fixed 44-byte header assumption.
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::uint32_t size = read_u32(chunk + 4);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size()) throw CorruptHeader("truncated chunk in " + path);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) throw CorruptHeader("fmt chunk too small in " + path);
      format = read_u16(bytes.data() + body);
      channels = read_u16(bytes.data() + body + 2);
      sample_rate = read_u32(bytes.data() + body + 4);
      bits = read_u16(bytes.data() + body + 14);
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.data() + body;
      data_size = size;
    }
    pos = body + size + (size % 2);  // chunks are word-aligned
  }
  if (!have_fmt || data == nullptr) throw CorruptHeader("missing fmt or data chunk in " + path);
  if (channels != 1) {
    throw UnsupportedChannels("expected mono, got " + std::to_string(channels) +
                              " channels in " + path);
  }
  if (sample_rate == 0) throw CorruptHeader("zero sample rate in " + path);

  TimeSignal out;
  out.sample_rate_hz = static_cast<double>(sample_rate);
  out.calibration_pa_per_fullscale = calibration_pa_per_fullscale;
  const double cal = calibration_pa_per_fullscale;

  if (format == 1 && bits == 16) {
    const std::size_t n = data_size / 2;
    out.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto v = static_cast<std::int16_t>(read_u16(data + 2 * i));
      out.samples[i] = cal * static_cast<double>(v) / 32768.0;
    }
  } else if (format == 1 && bits == 24) {
    const std::size_t n = data_size / 3;
    out.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const unsigned char* p = data + 3 * i;
      std::int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
      if (v & 0x800000) v |= ~0xFFFFFF;  // sign extend
      out.samples[i] = cal * static_cast<double>(v) / 8388608.0;
    }
  } else if (format == 3 && bits == 32) {
    const std::size_t n = data_size / 4;
    out.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::uint32_t raw = read_u32(data + 4 * i);
      float f;
      std::memcpy(&f, &raw, 4);
      out.samples[i] = cal * static_cast<double>(f);
    }
  } else {
    throw UnsupportedEncoding("format " + std::to_string(format) + "/" +
                              std::to_string(bits) + " bit not supported: " + path);
  }
  if (out.samples.empty()) throw CorruptHeader("empty data chunk in " + path);
  for (double s : out.samples) {
    if (!std::isfinite(s)) throw UnsupportedEncoding("non-finite sample in " + path);
  }
  return out;
}

void save_wav(const TimeSignal& signal, const std::string& path, WavEncoding encoding) {
  if (path.empty()) throw IoFailure("empty output path");
  for (double s : signal.samples) {
    if (!std::isfinite(s)) throw IoFailure("refusing to write non-finite samples");
  }

  const std::uint16_t bits = encoding == WavEncoding::pcm16 ? 16
                             : encoding == WavEncoding::pcm24 ? 24
                                                              : 32;
  const std::uint16_t fmt = encoding == WavEncoding::float32 ? 3 : 1;
  const auto rate = static_cast<std::uint32_t>(std::llround(signal.sample_rate_hz));
  const std::uint32_t bytes_per = bits / 8;
  const auto n = static_cast<std::uint32_t>(signal.samples.size());
  const std::uint32_t data_size = n * bytes_per;

  std::vector<unsigned char> out;
  out.reserve(44 + data_size);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put_u32(out, 36 + data_size);
  out.insert(out.end(), {'W', 'A', 'V', 'E'});
  out.insert(out.end(), {'f', 'm', 't', ' '});
  put_u32(out, 16);
  put_u16(out, fmt);
  put_u16(out, 1);  // mono
  put_u32(out, rate);
  put_u32(out, rate * bytes_per);
  put_u16(out, static_cast<std::uint16_t>(bytes_per));
  put_u16(out, bits);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put_u32(out, data_size);

  const double inv_cal = 1.0 / signal.calibration_pa_per_fullscale;
  for (double s : signal.samples) {
    const double x = s * inv_cal;
    if (encoding == WavEncoding::pcm16) {
      const double q = std::clamp(std::round(x * 32768.0), -32768.0, 32767.0);
      put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
    } else if (encoding == WavEncoding::pcm24) {
      const double q = std::clamp(std::round(x * 8388608.0), -8388608.0, 8388607.0);
      const auto v = static_cast<std::int32_t>(q);
      out.push_back(static_cast<unsigned char>(v & 0xFF));
      out.push_back(static_cast<unsigned char>((v >> 8) & 0xFF));
      out.push_back(static_cast<unsigned char>((v >> 16) & 0xFF));
    } else {
      const auto f = static_cast<float>(x);
      std::uint32_t raw;
      std::memcpy(&raw, &f, 4);
      put_u32(out, raw);
    }
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoFailure("cannot open for writing: " + path);
  file.write(reinterpret_cast<const char*>(out.data()),
             static_cast<std::streamsize>(out.size()));
  if (!file) throw IoFailure("short write: " + path);
}

}  // namespace gearsound
