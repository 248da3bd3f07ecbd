#pragma once

// report.json: {command, config_hash, reports: [IdentityReport...], timing}.

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "imgreen/identities.hpp"

namespace imgreen::io {

/// 64-bit FNV-1a, printed as 16 hex digits.
inline std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[i] = digits[h & 0xf];
  return out;
}

inline nlohmann::ordered_json to_json(const IdentityReport& r) {
  nlohmann::ordered_json j;
  j["name"] = r.name;
  j["residual"] = r.residual;
  j["tolerance"] = r.tolerance;
  j["pass"] = r.pass;
  j["mesh_size"] = r.mesh_size;
  nlohmann::ordered_json ctx = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.context) ctx[k] = v;
  j["context"] = ctx;
  return j;
}

struct Timing {
  bool recorded = false;
  double seconds = 0.0;
};

inline nlohmann::ordered_json make_report_json(const std::string& command, const std::string& config_hash,
                                               const std::vector<IdentityReport>& reports, const Timing& timing) {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["config_hash"] = config_hash;
  j["reports"] = nlohmann::ordered_json::array();
  for (const auto& r : reports) j["reports"].push_back(to_json(r));
  nlohmann::ordered_json t;
  t["recorded"] = timing.recorded;
  if (timing.recorded) t["seconds"] = timing.seconds;
  j["timing"] = t;
  return j;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path + " for writing");
  f << text;
}

}  // namespace imgreen::io
