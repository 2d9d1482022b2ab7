#pragma once

#include "ensure/core/types.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace ensure {

class FormatError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class ChecksumError : public FormatError
{
public:
  using FormatError::FormatError;
};

// Little-endian serialization independent of host byte order.
class ByteWriter
{
public:
  void bytes(void const *p, std::size_t n);
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f64(double v);
  [[nodiscard]] auto data() const -> std::vector<std::uint8_t> const & { return buf_; }

private:
  std::vector<std::uint8_t> buf_;
};

class ByteReader
{
public:
  ByteReader(std::vector<std::uint8_t> const &buf, std::string what, std::size_t limit = SIZE_MAX);
  auto u8() -> std::uint8_t;
  auto u32() -> std::uint32_t;
  auto u64() -> std::uint64_t;
  auto f64() -> double;
  auto str(std::size_t n) -> std::string;
  [[nodiscard]] auto done() const -> bool { return pos_ == end_; }
  [[nodiscard]] auto remaining() const -> std::size_t { return end_ - pos_; }

private:
  void need(std::size_t n);
  std::vector<std::uint8_t> const &buf_;
  std::string what_;
  std::size_t pos_ = 0;
  std::size_t end_;
};

auto read_file(std::filesystem::path const &path) -> std::vector<std::uint8_t>;
void write_file(std::filesystem::path const &path, std::vector<std::uint8_t> const &bytes);

auto crc32(std::uint8_t const *p, std::size_t n) -> std::uint32_t;

// Array files: "ENSL", u32 version, u32 record count, u32 element kind, the
// row-major payload, then a CRC32 of everything before it.
inline constexpr std::uint32_t kArrayVersion = 1;

enum class ElementKind : std::uint32_t
{
  U8 = 1,
  Complex128 = 2,
};

struct ArrayFile
{
  ElementKind kind = ElementKind::U8;
  std::uint32_t count = 0;
  std::vector<std::uint8_t> u8;
  std::vector<Cx> c128;
};

void write_array_file(std::filesystem::path const &path, ArrayFile const &a);
// Validates magic, version, checksum and that the payload holds count
// records of record_elems elements each.
auto read_array_file(std::filesystem::path const &path, ElementKind kind, std::size_t record_elems) -> ArrayFile;

} // namespace ensure
