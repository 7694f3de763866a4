#pragma once

// Tolerant comparison of report files against committed golden copies.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace golden {

namespace fs = std::filesystem;

// Keys holding file paths differ between machines.
inline bool ignored_key(const std::string& k) {
  return k == "input" || k == "checkpoint" || k == "matrix" || k == "ordering_file";
}

inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

inline std::string read(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void compare_json(const nlohmann::json& a, const nlohmann::json& b, const std::string& where,
                         std::vector<std::string>& diffs, double tol) {
  if (a.is_number() && b.is_number()) {
    if (!close(a.get<double>(), b.get<double>(), tol)) diffs.push_back(where + ": " + a.dump() + " vs " + b.dump());
    return;
  }
  if (a.type() != b.type()) {
    diffs.push_back(where + ": type differs");
    return;
  }
  if (a.is_object()) {
    for (auto it = b.begin(); it != b.end(); ++it) {
      if (ignored_key(it.key())) continue;
      if (!a.contains(it.key())) diffs.push_back(where + "." + it.key() + ": missing");
      else compare_json(a.at(it.key()), it.value(), where + "." + it.key(), diffs, tol);
    }
    for (auto it = a.begin(); it != a.end(); ++it)
      if (!b.contains(it.key())) diffs.push_back(where + "." + it.key() + ": unexpected");
  } else if (a.is_array()) {
    if (a.size() != b.size()) {
      diffs.push_back(where + ": length " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
      return;
    }
    for (std::size_t i = 0; i < a.size(); ++i) compare_json(a[i], b[i], where + "[" + std::to_string(i) + "]", diffs, tol);
  } else if (a != b) {
    diffs.push_back(where + ": " + a.dump() + " vs " + b.dump());
  }
}

inline std::vector<std::string> tokens(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',' || c == '\n' || c == ' ' || c == '\t' || c == '\r') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

inline void compare_text(const std::string& a, const std::string& b, const std::string& where,
                         std::vector<std::string>& diffs, double tol) {
  const auto ta = tokens(a), tb = tokens(b);
  if (ta.size() != tb.size()) {
    diffs.push_back(where + ": token count " + std::to_string(ta.size()) + " vs " + std::to_string(tb.size()));
    return;
  }
  for (std::size_t i = 0; i < ta.size(); ++i) {
    if (ta[i] == tb[i]) continue;
    char* ea = nullptr;
    char* eb = nullptr;
    const double x = std::strtod(ta[i].c_str(), &ea), y = std::strtod(tb[i].c_str(), &eb);
    if (*ea == '\0' && *eb == '\0' && close(x, y, tol)) continue;
    diffs.push_back(where + " token " + std::to_string(i) + ": " + ta[i] + " vs " + tb[i]);
  }
}

/// Every file in `expected` must exist in `actual` and agree to a relative
/// tolerance; path-valued keys are skipped.
inline std::vector<std::string> compare_dirs(const fs::path& actual, const fs::path& expected, double tol = 1e-7) {
  std::vector<std::string> diffs;
  for (const auto& e : fs::directory_iterator(expected)) {
    const auto name = e.path().filename();
    const auto got = actual / name;
    if (!fs::exists(got)) {
      diffs.push_back(name.string() + ": missing");
      continue;
    }
    if (name.extension() == ".json")
      compare_json(nlohmann::json::parse(read(got)), nlohmann::json::parse(read(e.path())), name.string(), diffs,
                   tol);
    else
      compare_text(read(got), read(e.path()), name.string(), diffs, tol);
  }
  return diffs;
}

}  // namespace golden
