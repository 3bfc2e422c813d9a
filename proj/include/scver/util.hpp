#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace scver {

// Toolchain version, embedded in reports and emitted Promela headers.
inline constexpr const char* kToolVersion = "0.1.0";

// FNV-1a over bytes. Used for state hashing; must be stable across runs
// and platforms, which rules out std::hash.
std::uint64_t fnv1a(std::string_view bytes);

// SHA-256 of a byte string, returned as lowercase hex.
std::string sha256_hex(std::string_view bytes);

std::string to_hex(std::string_view bytes);
std::string from_hex(std::string_view hex);  // throws std::invalid_argument on bad input

// Little-endian byte writer for canonical state serialization.
class ByteWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v);
  void i64(std::int64_t v);
  const std::string& bytes() const { return buf_; }
  std::string take() { return std::move(buf_); }

 private:
  std::string buf_;
};

// Matching reader; throws std::out_of_range when the buffer is exhausted.
class ByteReader {
 public:
  explicit ByteReader(std::string_view bytes) : buf_(bytes) {}
  std::uint8_t u8();
  std::uint32_t u32();
  std::int64_t i64();
  bool done() const { return pos_ == buf_.size(); }

 private:
  std::string_view buf_;
  std::size_t pos_ = 0;
};

}  // namespace scver
