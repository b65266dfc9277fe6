// Copyright 2026 The lidarloop Authors
// SPDX-License-Identifier: Apache-2.0
//
// Plain-text configuration: `key = value` lines grouped under `[section]`
// headers, `#` comments. Flag overrides use the dotted form
// `section.key=value`.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lidarloop {

class Config {
public:
  Config() = default;

  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text);

  /// Applies `section.key=value` (later wins).
  void set_override(const std::string& dotted_assignment);
  void set(const std::string& dotted_key, const std::string& value);

  bool has(const std::string& dotted_key) const;

  std::optional<std::string> get_string(const std::string& dotted_key) const;
  std::optional<double> get_double(const std::string& dotted_key) const;
  std::optional<std::int64_t> get_int(const std::string& dotted_key) const;
  std::optional<bool> get_bool(const std::string& dotted_key) const;
  /// Comma-separated list of doubles.
  std::optional<std::vector<double>> get_double_list(
      const std::string& dotted_key) const;

  double get_double_or(const std::string& dotted_key, double fallback) const;
  std::int64_t get_int_or(const std::string& dotted_key,
                          std::int64_t fallback) const;
  bool get_bool_or(const std::string& dotted_key, bool fallback) const;
  std::string get_string_or(const std::string& dotted_key,
                            const std::string& fallback) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

private:
  std::map<std::string, std::string> entries_;  // "section.key" -> value
};

}  // namespace lidarloop
