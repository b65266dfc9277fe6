// Copyright 2026 The lidarloop Authors
// SPDX-License-Identifier: Apache-2.0

#include "lidarloop/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "lidarloop/error.hpp"

namespace lidarloop {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_string(ss.str());
  } catch (const Error& e) {
    fail(e.code(), path + ": " + e.what());
  }
}

Config Config::parse_string(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        fail(ErrorCode::format,
             "line " + std::to_string(lineno) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::format,
           "line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      fail(ErrorCode::format, "line " + std::to_string(lineno) + ": empty key");
    cfg.entries_[section.empty() ? key : section + "." + key] = value;
  }
  return cfg;
}

void Config::set_override(const std::string& dotted_assignment) {
  const std::size_t eq = dotted_assignment.find('=');
  require(eq != std::string::npos, ErrorCode::invalid_argument,
          "override must look like section.key=value: " + dotted_assignment);
  set(trim(dotted_assignment.substr(0, eq)), trim(dotted_assignment.substr(eq + 1)));
}

void Config::set(const std::string& dotted_key, const std::string& value) {
  entries_[dotted_key] = value;
}

bool Config::has(const std::string& dotted_key) const {
  return entries_.contains(dotted_key);
}

std::optional<std::string> Config::get_string(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> Config::get_double(const std::string& key) const {
  auto s = get_string(key);
  if (!s) return std::nullopt;
  std::size_t used = 0;
  double v;
  try {
    v = std::stod(*s, &used);
  } catch (const std::exception&) {
    fail(ErrorCode::format, key + ": not a number: " + *s);
  }
  if (used != s->size()) fail(ErrorCode::format, key + ": not a number: " + *s);
  return v;
}

std::optional<std::int64_t> Config::get_int(const std::string& key) const {
  auto s = get_string(key);
  if (!s) return std::nullopt;
  std::size_t used = 0;
  std::int64_t v;
  try {
    v = std::stoll(*s, &used);
  } catch (const std::exception&) {
    fail(ErrorCode::format, key + ": not an integer: " + *s);
  }
  if (used != s->size()) fail(ErrorCode::format, key + ": not an integer: " + *s);
  return v;
}

std::optional<bool> Config::get_bool(const std::string& key) const {
  auto s = get_string(key);
  if (!s) return std::nullopt;
  std::string v = *s;
  std::transform(v.begin(), v.end(), v.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  fail(ErrorCode::format, key + ": not a boolean: " + *s);
}

std::optional<std::vector<double>> Config::get_double_list(
    const std::string& key) const {
  auto s = get_string(key);
  if (!s) return std::nullopt;
  std::vector<double> out;
  std::istringstream ss(*s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      fail(ErrorCode::format, key + ": not a number list: " + *s);
    }
  }
  return out;
}

double Config::get_double_or(const std::string& key, double fallback) const {
  return get_double(key).value_or(fallback);
}

std::int64_t Config::get_int_or(const std::string& key,
                                std::int64_t fallback) const {
  return get_int(key).value_or(fallback);
}

bool Config::get_bool_or(const std::string& key, bool fallback) const {
  return get_bool(key).value_or(fallback);
}

std::string Config::get_string_or(const std::string& key,
                                  const std::string& fallback) const {
  return get_string(key).value_or(fallback);
}

}  // namespace lidarloop
