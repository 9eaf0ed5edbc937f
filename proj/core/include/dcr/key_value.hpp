// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>

namespace dcr {

/// Plain-text `key = value` configuration. Blank lines and lines starting
/// with '#' are ignored; keys are unique. Getters record which keys were
/// read so callers can reject typos with `unused_keys()`.
class KeyValue {
 public:
  KeyValue() = default;

  /// Throws DataError with the line number on malformed input.
  static KeyValue parse(const std::string& text, const std::string& origin = "<string>");
  static KeyValue load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value);
  [[nodiscard]] bool has(const std::string& key) const;
  [[nodiscard]] const std::map<std::string, std::string>& entries() const { return entries_; }

  // Return `fallback` when absent; throw DataError when present but malformed.
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  /// Throws DataError when the key is absent.
  std::string require(const std::string& key) const;

  [[nodiscard]] std::set<std::string> unused_keys() const;
  /// Throws DataError naming every key no getter asked for.
  void reject_unused() const;

  /// Serialises in key order, one `key=value` per line.
  [[nodiscard]] std::string str() const;

 private:
  std::map<std::string, std::string> entries_;
  std::string origin_ = "<string>";
  mutable std::set<std::string> used_;
};

/// Full-precision decimal that parses back to the same double.
std::string format_double(double v);

}  // namespace dcr
