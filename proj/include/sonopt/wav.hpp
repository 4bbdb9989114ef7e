#pragma once

// Mono RIFF/WAVE encoding, 16-bit PCM or 32-bit IEEE float, little-endian.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "sonopt/error.hpp"

namespace sonopt {

enum class WavFormat { Pcm16, Float32 };

namespace detail {

inline void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

inline void put_tag(std::vector<std::uint8_t>& out, const char (&tag)[5]) { out.insert(out.end(), tag, tag + 4); }

inline std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) | static_cast<std::uint32_t>(b[at + 1]) << 8 |
         static_cast<std::uint32_t>(b[at + 2]) << 16 | static_cast<std::uint32_t>(b[at + 3]) << 24;
}

inline std::uint16_t get_u16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | b[at + 1] << 8);
}

}  // namespace detail

inline std::int16_t to_pcm16(double s) {
  return static_cast<std::int16_t>(std::lround(std::clamp(s, -1.0, 1.0) * 32767.0));
}

inline std::vector<std::uint8_t> encode_wav(std::span<const double> samples, std::uint32_t sample_rate,
                                            WavFormat format = WavFormat::Pcm16) {
  const std::uint16_t bytes_per_sample = format == WavFormat::Pcm16 ? 2 : 4;
  const auto data_bytes = static_cast<std::uint32_t>(samples.size() * bytes_per_sample);
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  detail::put_tag(out, "RIFF");
  detail::put_u32(out, 36 + data_bytes);
  detail::put_tag(out, "WAVE");
  detail::put_tag(out, "fmt ");
  detail::put_u32(out, 16);
  detail::put_u16(out, format == WavFormat::Pcm16 ? 1 : 3);
  detail::put_u16(out, 1);
  detail::put_u32(out, sample_rate);
  detail::put_u32(out, sample_rate * bytes_per_sample);
  detail::put_u16(out, bytes_per_sample);
  detail::put_u16(out, static_cast<std::uint16_t>(bytes_per_sample * 8));
  detail::put_tag(out, "data");
  detail::put_u32(out, data_bytes);
  for (double s : samples) {
    if (format == WavFormat::Pcm16) {
      detail::put_u16(out, static_cast<std::uint16_t>(to_pcm16(s)));
    } else {
      const auto f = static_cast<float>(std::clamp(s, -1.0, 1.0));
      std::uint32_t bits = 0;
      std::memcpy(&bits, &f, sizeof bits);
      detail::put_u32(out, bits);
    }
  }
  return out;
}

struct WavData {
  std::uint32_t sample_rate = 0;
  WavFormat format = WavFormat::Pcm16;
  std::vector<double> samples;
};

/// Reads back what encode_wav writes (canonical 44-byte header only).
inline WavData decode_wav(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 44 || std::memcmp(bytes.data(), "RIFF", 4) != 0 || std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw Error(Errc::Io, "not a RIFF/WAVE file");
  }
  WavData wav;
  const std::uint16_t tag = detail::get_u16(bytes, 20);
  wav.format = tag == 3 ? WavFormat::Float32 : WavFormat::Pcm16;
  wav.sample_rate = detail::get_u32(bytes, 24);
  const std::uint32_t data_bytes = detail::get_u32(bytes, 40);
  if (44 + static_cast<std::size_t>(data_bytes) > bytes.size()) throw Error(Errc::Io, "truncated data chunk");
  const std::size_t width = wav.format == WavFormat::Pcm16 ? 2 : 4;
  for (std::size_t at = 44; at + width <= 44 + data_bytes; at += width) {
    if (wav.format == WavFormat::Pcm16) {
      wav.samples.push_back(static_cast<std::int16_t>(detail::get_u16(bytes, at)) / 32767.0);
    } else {
      const std::uint32_t bits = detail::get_u32(bytes, at);
      float f = 0.0f;
      std::memcpy(&f, &bits, sizeof f);
      wav.samples.push_back(f);
    }
  }
  return wav;
}

inline void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(Errc::Io, "cannot open " + path + " for writing");
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw Error(Errc::Io, "short write to " + path);
}

inline std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(Errc::Io, "cannot open " + path);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

}  // namespace sonopt
