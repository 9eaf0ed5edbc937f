// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#include "dcr/ten_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include "dcr/errors.hpp"

namespace dcr {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& out, double d) {
  const auto v = std::bit_cast<std::uint64_t>(d);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return v;
}

double get_f64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return std::bit_cast<double>(v);
}

}  // namespace

std::vector<std::uint8_t> encode_ten(const Tensor& t) {
  const Shape s = t.shape();
  for (auto e : {s.n, s.c, s.h, s.w}) {
    if (e > std::numeric_limits<std::uint32_t>::max()) {
      throw ShapeError("encode_ten: extent too large for .ten format");
    }
  }
  std::vector<std::uint8_t> out;
  out.reserve(static_cast<std::size_t>(ten_file_bytes(s)));
  out.insert(out.end(), std::begin(kTenMagic), std::end(kTenMagic));
  put_u32(out, static_cast<std::uint32_t>(s.n));
  put_u32(out, static_cast<std::uint32_t>(s.c));
  put_u32(out, static_cast<std::uint32_t>(s.h));
  put_u32(out, static_cast<std::uint32_t>(s.w));
  for (double v : t.data()) put_f64(out, v);
  return out;
}

Tensor decode_ten(const std::vector<std::uint8_t>& bytes, const std::string& name) {
  if (bytes.size() < kTenHeaderBytes) {
    throw DataError(name + ": truncated .ten header: expected at least " +
                    std::to_string(kTenHeaderBytes) + " bytes, got " +
                    std::to_string(bytes.size()));
  }
  if (std::memcmp(bytes.data(), kTenMagic, 4) != 0) {
    throw DataError(name + ": bad .ten magic");
  }
  const Shape s{get_u32(bytes.data() + 4), get_u32(bytes.data() + 8), get_u32(bytes.data() + 12),
                get_u32(bytes.data() + 16)};
  if (s.n == 0 || s.c == 0 || s.h == 0 || s.w == 0) {
    throw DataError(name + ": .ten header has a zero extent (" + s.str() + ")");
  }
  const auto expected = ten_file_bytes(s);
  if (bytes.size() != expected) {
    throw DataError(name + ": .ten size mismatch for shape " + s.str() + ": expected " +
                    std::to_string(expected) + " bytes, got " + std::to_string(bytes.size()));
  }
  std::vector<double> values(static_cast<std::size_t>(s.numel()));
  const std::uint8_t* p = bytes.data() + kTenHeaderBytes;
  for (auto& v : values) {
    v = get_f64(p);
    p += 8;
  }
  return Tensor(s, std::move(values));
}

void write_ten(const std::filesystem::path& path, const Tensor& t) {
  const auto bytes = encode_ten(t);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(path.string() + ": cannot open for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError(path.string() + ": write failed");
}

Tensor read_ten(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.string() + ": cannot open for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_ten(bytes, path.string());
}

}  // namespace dcr
