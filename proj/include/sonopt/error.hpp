#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sonopt {

enum class Errc {
  EmptyFront,
  NonFiniteValue,
  BufferOverflow,
  NonConsecutive,
  IndexOutOfRange,
  LengthMismatch,
  AudioTooShort,
  OutOfBounds,
  MalformedPacket,
  UnknownAddress,
  CountMismatch,
  InvalidParam,
  NotLiveTunable,
  BadLog,
  Io,
};

constexpr std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::EmptyFront: return "EmptyFront";
    case Errc::NonFiniteValue: return "NonFiniteValue";
    case Errc::BufferOverflow: return "BufferOverflow";
    case Errc::NonConsecutive: return "NonConsecutive";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::AudioTooShort: return "AudioTooShort";
    case Errc::OutOfBounds: return "OutOfBounds";
    case Errc::MalformedPacket: return "MalformedPacket";
    case Errc::UnknownAddress: return "UnknownAddress";
    case Errc::CountMismatch: return "CountMismatch";
    case Errc::InvalidParam: return "InvalidParam";
    case Errc::NotLiveTunable: return "NotLiveTunable";
    case Errc::BadLog: return "BadLog";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

// Every failure raised by the library carries one of the codes above.
// `index` identifies the offending element where that makes sense
// (NonFiniteValue, IndexOutOfRange).
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what, std::optional<std::size_t> index = std::nullopt)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), index_(index) {}

  Errc code() const noexcept { return code_; }
  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  Errc code_;
  std::optional<std::size_t> index_;
};

}  // namespace sonopt
