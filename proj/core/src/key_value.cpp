// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#include "dcr/key_value.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dcr/errors.hpp"

namespace dcr {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

KeyValue KeyValue::parse(const std::string& text, const std::string& origin) {
  KeyValue kv;
  kv.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw DataError(origin + ":" + std::to_string(number) + ": expected key=value");
    }
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw DataError(origin + ":" + std::to_string(number) + ": empty key");
    if (kv.entries_.count(key) != 0) {
      throw DataError(origin + ":" + std::to_string(number) + ": duplicate key '" + key + "'");
    }
    kv.entries_[key] = trim(t.substr(eq + 1));
  }
  return kv;
}

KeyValue KeyValue::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open config " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return parse(os.str(), path.string());
}

void KeyValue::set(const std::string& key, const std::string& value) { entries_[key] = value; }

bool KeyValue::has(const std::string& key) const { return entries_.count(key) != 0; }

std::string KeyValue::get_string(const std::string& key, const std::string& fallback) const {
  used_.insert(key);
  auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

double KeyValue::get_double(const std::string& key, double fallback) const {
  used_.insert(key);
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  const std::string& s = it->second;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw DataError(origin_ + ": '" + key + "' is not a number: '" + s + "'");
  }
  return v;
}

std::int64_t KeyValue::get_int(const std::string& key, std::int64_t fallback) const {
  used_.insert(key);
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  const std::string& s = it->second;
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw DataError(origin_ + ": '" + key + "' is not an integer: '" + s + "'");
  }
  return v;
}

std::uint64_t KeyValue::get_uint(const std::string& key, std::uint64_t fallback) const {
  used_.insert(key);
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  const std::string& s = it->second;
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw DataError(origin_ + ": '" + key + "' is not an unsigned integer: '" + s + "'");
  }
  return v;
}

bool KeyValue::get_bool(const std::string& key, bool fallback) const {
  used_.insert(key);
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  const std::string& s = it->second;
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  throw DataError(origin_ + ": '" + key + "' is not a boolean: '" + s + "'");
}

std::string KeyValue::require(const std::string& key) const {
  used_.insert(key);
  auto it = entries_.find(key);
  if (it == entries_.end()) throw DataError(origin_ + ": missing key '" + key + "'");
  return it->second;
}

std::set<std::string> KeyValue::unused_keys() const {
  std::set<std::string> out;
  for (const auto& [k, v] : entries_) {
    if (used_.count(k) == 0) out.insert(k);
  }
  return out;
}

void KeyValue::reject_unused() const {
  const auto unused = unused_keys();
  if (unused.empty()) return;
  std::string msg = origin_ + ": unknown key(s):";
  for (const auto& k : unused) msg += " " + k;
  throw DataError(msg);
}

std::string KeyValue::str() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + "=" + v + "\n";
  return out;
}

std::string format_double(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace dcr
