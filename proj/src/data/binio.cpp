#include "ensure/data/binio.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>

namespace ensure {

void ByteWriter::bytes(void const *p, std::size_t n)
{
  auto const *b = static_cast<std::uint8_t const *>(p);
  buf_.insert(buf_.end(), b, b + n);
}

void ByteWriter::u32(std::uint32_t v)
{
  for (int i = 0; i < 4; ++i)
    buf_.push_back(std::uint8_t(v >> (8 * i)));
}

void ByteWriter::u64(std::uint64_t v)
{
  for (int i = 0; i < 8; ++i)
    buf_.push_back(std::uint8_t(v >> (8 * i)));
}

void ByteWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

ByteReader::ByteReader(std::vector<std::uint8_t> const &buf, std::string what, std::size_t limit)
  : buf_(buf), what_(std::move(what)), end_(std::min(limit, buf.size()))
{
}

void ByteReader::need(std::size_t n)
{
  if (end_ - pos_ < n)
    throw FormatError(what_ + ": unexpected end of data");
}

auto ByteReader::u8() -> std::uint8_t
{
  need(1);
  return buf_[pos_++];
}

auto ByteReader::u32() -> std::uint32_t
{
  need(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i)
    v |= std::uint32_t(buf_[pos_++]) << (8 * i);
  return v;
}

auto ByteReader::u64() -> std::uint64_t
{
  need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i)
    v |= std::uint64_t(buf_[pos_++]) << (8 * i);
  return v;
}

auto ByteReader::f64() -> double { return std::bit_cast<double>(u64()); }

auto ByteReader::str(std::size_t n) -> std::string
{
  need(n);
  std::string s(reinterpret_cast<char const *>(buf_.data() + pos_), n);
  pos_ += n;
  return s;
}

auto read_file(std::filesystem::path const &path) -> std::vector<std::uint8_t>
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open " + path.string());
  std::vector<std::uint8_t> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return buf;
}

void write_file(std::filesystem::path const &path, std::vector<std::uint8_t> const &bytes)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw std::runtime_error("cannot create " + path.string());
  out.write(reinterpret_cast<char const *>(bytes.data()), std::streamsize(bytes.size()));
  if (!out)
    throw std::runtime_error("write failed for " + path.string());
}

auto crc32(std::uint8_t const *p, std::size_t n) -> std::uint32_t
{
  uLong c = ::crc32(0L, Z_NULL, 0);
  while (n > 0) {
    auto const chunk = static_cast<uInt>(std::min<std::size_t>(n, 1u << 30));
    c = ::crc32(c, p, chunk);
    p += chunk;
    n -= chunk;
  }
  return static_cast<std::uint32_t>(c);
}

void write_array_file(std::filesystem::path const &path, ArrayFile const &a)
{
  ByteWriter w;
  w.bytes("ENSL", 4);
  w.u32(kArrayVersion);
  w.u32(a.count);
  w.u32(static_cast<std::uint32_t>(a.kind));
  if (a.kind == ElementKind::U8) {
    w.bytes(a.u8.data(), a.u8.size());
  } else {
    for (Cx const &v : a.c128) {
      w.f64(v.real());
      w.f64(v.imag());
    }
  }
  auto bytes = w.data();
  std::uint32_t const crc = crc32(bytes.data(), bytes.size());
  for (int i = 0; i < 4; ++i)
    bytes.push_back(std::uint8_t(crc >> (8 * i)));
  write_file(path, bytes);
}

auto read_array_file(std::filesystem::path const &path, ElementKind kind, std::size_t record_elems) -> ArrayFile
{
  auto const buf = read_file(path);
  std::string const name = path.filename().string();
  if (buf.size() < 20)
    throw FormatError(name + ": file too short");
  std::size_t const body = buf.size() - 4;
  std::uint32_t stored = 0;
  for (int i = 0; i < 4; ++i)
    stored |= std::uint32_t(buf[body + i]) << (8 * i);
  if (crc32(buf.data(), body) != stored)
    throw ChecksumError(name + ": checksum mismatch (file corrupt or truncated)");

  ByteReader r(buf, name, body);
  if (r.str(4) != "ENSL")
    throw FormatError(name + ": bad magic");
  if (auto v = r.u32(); v != kArrayVersion)
    throw FormatError(name + ": unsupported format version " + std::to_string(v));
  ArrayFile a;
  a.count = r.u32();
  a.kind = static_cast<ElementKind>(r.u32());
  if (a.kind != kind)
    throw FormatError(name + ": unexpected element kind");
  std::size_t const elem = kind == ElementKind::U8 ? 1 : 16;
  if (r.remaining() != std::size_t(a.count) * record_elems * elem)
    throw FormatError(name + ": payload size does not match " + std::to_string(a.count) + " records");
  std::size_t const n = std::size_t(a.count) * record_elems;
  if (kind == ElementKind::U8) {
    a.u8.resize(n);
    for (auto &b : a.u8)
      b = r.u8();
  } else {
    a.c128.resize(n);
    for (auto &c : a.c128) {
      double const re = r.f64();
      c = Cx{re, r.f64()};
    }
  }
  return a;
}

} // namespace ensure
