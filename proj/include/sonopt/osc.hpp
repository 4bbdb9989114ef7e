#pragma once

// OSC 1.0 wire schema for fronts and parameter changes.
//
//   /sonopt/front  ,ii f...f   generation (int32), N (int32), f1_0 f2_0 ... f1_{N-1} f2_{N-1} (float32)
//   /sonopt/param  ,sf         parameter name (string), value (float32)
//
// Strings are NUL-terminated and zero-padded to a multiple of four bytes;
// numbers are big-endian. Bundles are not accepted.

#include <bit>
#include <cstdint>
#include <cstring>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sonopt/error.hpp"
#include "sonopt/front_model.hpp"
#include "sonopt/params.hpp"

namespace sonopt::osc {

inline constexpr std::string_view kFrontAddress = "/sonopt/front";
inline constexpr std::string_view kParamAddress = "/sonopt/param";
inline constexpr std::size_t kMaxPacketBytes = 60 * 1024;

struct FrontMessage {
  std::int32_t generation_index = 0;
  std::vector<std::pair<float, float>> points;

  friend bool operator==(const FrontMessage&, const FrontMessage&) = default;
};

struct ParamMessage {
  std::string name;
  float value = 0.0f;

  friend bool operator==(const ParamMessage&, const ParamMessage&) = default;
};

using Message = std::variant<FrontMessage, ParamMessage>;

namespace detail {

inline void put_string(std::vector<std::uint8_t>& out, std::string_view s) {
  out.insert(out.end(), s.begin(), s.end());
  const std::size_t pad = 4 - s.size() % 4;  // at least one NUL
  out.insert(out.end(), pad, 0);
}

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

inline void put_f32(std::vector<std::uint8_t>& out, float f) { put_u32(out, std::bit_cast<std::uint32_t>(f)); }

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

  std::string_view string() {
    const auto* begin = bytes_.data() + pos_;
    const auto* nul = static_cast<const std::uint8_t*>(std::memchr(begin, 0, remaining()));
    if (!nul) throw Error(Errc::MalformedPacket, "unterminated string");
    const auto len = static_cast<std::size_t>(nul - begin);
    const std::size_t padded = (len / 4 + 1) * 4;
    if (padded > remaining()) throw Error(Errc::MalformedPacket, "string padding runs past end of packet");
    for (std::size_t i = len; i < padded; ++i) {
      if (begin[i] != 0) throw Error(Errc::MalformedPacket, "non-zero string padding");
    }
    pos_ += padded;
    return {reinterpret_cast<const char*>(begin), len};
  }

  std::uint32_t u32() {
    if (remaining() < 4) throw Error(Errc::MalformedPacket, "truncated argument");
    const auto* b = bytes_.data() + pos_;
    pos_ += 4;
    return static_cast<std::uint32_t>(b[0]) << 24 | static_cast<std::uint32_t>(b[1]) << 16 |
           static_cast<std::uint32_t>(b[2]) << 8 | static_cast<std::uint32_t>(b[3]);
  }

  std::int32_t i32() { return std::bit_cast<std::int32_t>(u32()); }
  float f32() { return std::bit_cast<float>(u32()); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline std::vector<std::uint8_t> encode(const FrontMessage& m) {
  std::vector<std::uint8_t> out;
  out.reserve(16 + m.points.size() * 10 + 16);
  detail::put_string(out, kFrontAddress);
  std::string tags = ",ii";
  tags.append(2 * m.points.size(), 'f');
  detail::put_string(out, tags);
  detail::put_u32(out, std::bit_cast<std::uint32_t>(m.generation_index));
  detail::put_u32(out, static_cast<std::uint32_t>(m.points.size()));
  for (const auto& [f1, f2] : m.points) {
    detail::put_f32(out, f1);
    detail::put_f32(out, f2);
  }
  return out;
}

inline std::vector<std::uint8_t> encode(const ParamMessage& m) {
  std::vector<std::uint8_t> out;
  detail::put_string(out, kParamAddress);
  detail::put_string(out, ",sf");
  detail::put_string(out, m.name);
  detail::put_f32(out, m.value);
  return out;
}

inline std::vector<std::uint8_t> encode(const Message& m) {
  return std::visit([](const auto& v) { return encode(v); }, m);
}

/// Throws Error with MalformedPacket, UnknownAddress or CountMismatch; never
/// anything else, whatever the input.
inline Message decode(std::span<const std::uint8_t> bytes) {
  if (bytes.size() > kMaxPacketBytes) throw Error(Errc::CountMismatch, "packet exceeds 60 KB");
  if (bytes.size() < 8 || bytes.size() % 4 != 0) throw Error(Errc::MalformedPacket, "size not a positive multiple of 4");
  detail::Reader r(bytes);
  const auto address = r.string();
  if (address.empty() || address.front() != '/') throw Error(Errc::MalformedPacket, "address must start with '/'");
  const bool is_front = address == kFrontAddress;
  if (!is_front && address != kParamAddress) throw Error(Errc::UnknownAddress, std::string(address));

  const auto tags = r.string();
  if (tags.empty() || tags.front() != ',') throw Error(Errc::MalformedPacket, "missing type tag string");
  const auto types = tags.substr(1);

  if (!is_front) {
    if (types != "sf") throw Error(Errc::MalformedPacket, "param message must be typed ,sf");
    ParamMessage m;
    m.name = std::string(r.string());
    m.value = r.f32();
    if (r.remaining() != 0) throw Error(Errc::MalformedPacket, "trailing bytes");
    if (!is_param_name(m.name)) throw Error(Errc::MalformedPacket, "unknown parameter '" + m.name + "'");
    return m;
  }

  if (types.size() < 2 || types[0] != 'i' || types[1] != 'i') {
    throw Error(Errc::MalformedPacket, "front message must start with two int32 arguments");
  }
  const auto floats = types.substr(2);
  if (floats.find_first_not_of('f') != std::string_view::npos) {
    throw Error(Errc::MalformedPacket, "front values must be float32");
  }
  if (r.remaining() != 4 * types.size()) throw Error(Errc::MalformedPacket, "argument bytes do not match type tags");

  FrontMessage m;
  m.generation_index = r.i32();
  const std::int32_t n = r.i32();
  if (m.generation_index < 0) throw Error(Errc::MalformedPacket, "negative generation index");
  if (n < 1 || floats.size() != 2 * static_cast<std::size_t>(n)) {
    throw Error(Errc::CountMismatch,
                "declared " + std::to_string(n) + " points but carries " + std::to_string(floats.size()) + " values");
  }
  m.points.reserve(static_cast<std::size_t>(n));
  for (std::int32_t i = 0; i < n; ++i) {
    const float f1 = r.f32();
    const float f2 = r.f32();
    m.points.emplace_back(f1, f2);
  }
  return m;
}

inline RawFront to_raw_front(const FrontMessage& m, std::string source_id = "osc") {
  RawFront f;
  f.generation_index = static_cast<std::uint64_t>(m.generation_index);
  f.source_id = std::move(source_id);
  f.points.reserve(m.points.size());
  for (const auto& [f1, f2] : m.points) f.points.push_back({f1, f2});
  return f;
}

inline FrontMessage from_raw_front(const RawFront& f) {
  FrontMessage m;
  m.generation_index = static_cast<std::int32_t>(f.generation_index);
  m.points.reserve(f.points.size());
  for (const auto& p : f.points) m.points.emplace_back(static_cast<float>(p.f1), static_cast<float>(p.f2));
  return m;
}

/// Orders the incoming front stream: late and duplicate generations are
/// dropped, gaps pass through (the engine resets recurrence across them).
class FrontSequencer {
 public:
  struct Outcome {
    std::optional<RawFront> front;
    bool gap = false;
  };

  Outcome accept(const FrontMessage& m, std::string source_id = "osc") {
    const auto gen = static_cast<std::uint64_t>(m.generation_index);
    if (last_ && gen <= *last_) {
      ++dropped_;
      return {};
    }
    const bool gap = last_ && gen != *last_ + 1;
    if (gap) ++gaps_;
    last_ = gen;
    return {to_raw_front(m, std::move(source_id)), gap};
  }

  std::optional<std::uint64_t> last_generation() const noexcept { return last_; }
  std::size_t dropped() const noexcept { return dropped_; }
  std::size_t gaps() const noexcept { return gaps_; }

 private:
  std::optional<std::uint64_t> last_;
  std::size_t dropped_ = 0;
  std::size_t gaps_ = 0;
};

}  // namespace sonopt::osc
