#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "movavg/remote.hpp"

namespace movavg {

inline constexpr int kDefaultPort = 8777;
inline constexpr int kDefaultPeriod = 20;
inline constexpr std::string_view kEndpointEnv = "MOVA_ENDPOINT";

struct AppConfig {
  RemoteEndpointConfig endpoint;
  std::chrono::seconds ttl = std::chrono::minutes(15);
  std::string bind = "127.0.0.1";
  int port = kDefaultPort;
  int default_period = kDefaultPeriod;
};

/// $XDG_CONFIG_HOME/movavg/config.json, falling back to ~/.config/movavg/.
std::filesystem::path default_config_path();

/// Reads a JSON object with optional keys endpoint, ttl_seconds,
/// timeout_seconds, max_retries, bind, port and default_period.
AppConfig parse_app_config(std::string_view json, AppConfig base = {});

/// Loads `path` (must exist) or the default path (may be absent), then applies
/// the MOVA_ENDPOINT override.
AppConfig load_app_config(const std::optional<std::filesystem::path>& path = std::nullopt);

}  // namespace movavg
