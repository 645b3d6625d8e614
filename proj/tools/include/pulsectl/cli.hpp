// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: subcommands spectrum, region, simulate, verify.
// Exit codes: 0 success, 1 domain error, 2 numerical failure, 64 usage.

#pragma once

#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

namespace pulsectl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitUsage = 64;

struct RunManifest {
  std::string tool = "pulsectl";
  std::string version;
  std::string schema;
  std::string subcommand;
  nlohmann::json parameters;  ///< resolved inputs after merging config and flags
  std::string timestamp;      ///< UTC ISO-8601; SOURCE_DATE_EPOCH when set
  std::string config_hash;    ///< SHA-256 of parameters.dump()
};

RunManifest make_manifest(const std::string& subcommand, const nlohmann::json& parameters);
nlohmann::json to_json(const RunManifest& m);

std::string sha256_hex(const std::string& data);

/// printf("%.17g").
std::string format_g17(double x);

/// Parses argv (argv[0] is the program name), runs the subcommand and
/// returns the exit code. Results go to `out`, diagnostics to `err`.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pulsectl::cli
