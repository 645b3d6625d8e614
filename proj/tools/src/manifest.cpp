// SPDX-License-Identifier: Apache-2.0

#include <array>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <string>

#include <openssl/evp.h>

#include "pulsectl/cli.hpp"
#include "pulsectl/json_io.hpp"
#include "pulsectl/version.hpp"

namespace pulsectl::cli {

namespace {

std::string utc_timestamp() {
  std::time_t t = 0;
  if (const char* sde = std::getenv("SOURCE_DATE_EPOCH"); sde != nullptr && *sde != '\0') {
    t = static_cast<std::time_t>(std::strtoll(sde, nullptr, 10));
  } else {
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::array<char, 32> buf{};
  std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf.data();
}

}  // namespace

std::string sha256_hex(const std::string& data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[md[i] >> 4]);
    out.push_back(kHex[md[i] & 0xF]);
  }
  return out;
}

std::string format_g17(double x) {
  std::array<char, 40> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", x);
  return buf.data();
}

RunManifest make_manifest(const std::string& subcommand, const nlohmann::json& parameters) {
  RunManifest m;
  m.version = kVersion;
  m.schema = kSchemaVersion;
  m.subcommand = subcommand;
  m.parameters = parameters;
  m.timestamp = utc_timestamp();
  m.config_hash = sha256_hex(parameters.dump());
  return m;
}

nlohmann::json to_json(const RunManifest& m) {
  return {{"tool", m.tool},
          {"version", m.version},
          {"schema", m.schema},
          {"subcommand", m.subcommand},
          {"parameters", m.parameters},
          {"timestamp", m.timestamp},
          {"config_sha256", m.config_hash}};
}

}  // namespace pulsectl::cli
