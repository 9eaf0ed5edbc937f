// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dcr/tensor.hpp"

namespace dcr {

// .ten layout: magic "TEN1", four little-endian uint32 extents (N, C, H, W),
// then N*C*H*W little-endian IEEE-754 doubles in row-major order.
inline constexpr char kTenMagic[4] = {'T', 'E', 'N', '1'};
inline constexpr std::size_t kTenHeaderBytes = 20;

[[nodiscard]] inline std::uintmax_t ten_file_bytes(const Shape& s) {
  return kTenHeaderBytes + 8u * static_cast<std::uintmax_t>(s.numel());
}

std::vector<std::uint8_t> encode_ten(const Tensor& t);
/// Throws DataError on bad magic or a payload whose length disagrees with the
/// header; `name` is used in the message.
Tensor decode_ten(const std::vector<std::uint8_t>& bytes, const std::string& name = "<buffer>");

void write_ten(const std::filesystem::path& path, const Tensor& t);
Tensor read_ten(const std::filesystem::path& path);

}  // namespace dcr
