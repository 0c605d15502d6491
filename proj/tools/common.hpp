#pragma once

#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "beamgp/beamgp.hpp"

namespace beamgp::cli {

// Exit codes, one class per failure family.
inline constexpr int kExitOk = 0;
inline constexpr int kExitOther = 1;
inline constexpr int kExitParse = 2;
inline constexpr int kExitConfig = 3;
inline constexpr int kExitNumerical = 4;
inline constexpr int kExitIo = 5;

inline std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  for (const std::string& tok : detail::split(text, ',')) {
    const std::string t = detail::trim(tok);
    if (t.empty()) continue;
    if (t == "inf" || t == "Inf" || t == "INF") {
      out.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    const auto v = detail::try_parse_double(t);
    if (!v) throw ConfigError("bad number in list: '" + t + "'");
    out.push_back(*v);
  }
  if (out.empty()) throw ConfigError("empty list: '" + text + "'");
  return out;
}

inline std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (double v : parse_double_list(text)) out.push_back(static_cast<int>(v));
  return out;
}

inline std::vector<QuantityKind> parse_kind_list(const std::string& text) {
  std::vector<QuantityKind> kinds;
  for (const std::string& tok : detail::split(text, ',')) {
    const std::string t = detail::trim(tok);
    if (t.empty()) continue;
    const auto kind = parse_kind_tag(t);
    if (!kind) throw ConfigError("unknown quantity kind tag: '" + t + "'");
    kinds.push_back(*kind);
  }
  if (kinds.empty()) throw ConfigError("empty kind list");
  return kinds;
}

inline std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> xs;
  xs.reserve(static_cast<std::size_t>(n));
  if (n == 1) {
    xs.push_back(0.5 * (lo + hi));
    return xs;
  }
  for (int i = 0; i < n; ++i)
    xs.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
  return xs;
}

inline void ensure_out_dir(const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + out_dir + "': " + ec.message());
  if (!std::filesystem::is_directory(out_dir))
    throw IoError("output path is not a directory: " + out_dir);
}

/// Every run writes a manifest with the original argv and the resolved
/// options, so the output directory can be reproduced from it alone.
inline void write_manifest(const std::string& out_dir, const std::string& command,
                           const std::vector<std::string>& argv, const nlohmann::json& options) {
  nlohmann::json manifest;
  manifest["tool"] = "beamgp";
  manifest["command"] = command;
  manifest["argv"] = argv;
  manifest["options"] = options;
  const std::string path = out_dir + "/manifest.json";
  std::ofstream out(path);
  if (!out) throw IoError("cannot write manifest: " + path);
  out << manifest.dump(2) << '\n';
  if (!out) throw IoError("failed while writing manifest: " + path);
}

inline std::string default_config_path(const std::string& data_path) {
  std::filesystem::path p(data_path);
  p.replace_extension(".cfg");
  return p.string();
}

}  // namespace beamgp::cli
