#include "movavg/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "movavg/error.hpp"

namespace movavg {

std::filesystem::path default_config_path() {
  if (const char* xdg = std::getenv("XDG_CONFIG_HOME"); xdg && *xdg) {
    return std::filesystem::path(xdg) / "movavg" / "config.json";
  }
  if (const char* home = std::getenv("HOME"); home && *home) {
    return std::filesystem::path(home) / ".config" / "movavg" / "config.json";
  }
  return std::filesystem::path("movavg.json");
}

AppConfig parse_app_config(std::string_view json, AppConfig config) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::invalid_config, fmt::format("config is not valid JSON: {}", e.what()));
  }
  if (!doc.is_object()) throw Error(ErrorCode::invalid_config, "config must be a JSON object");

  try {
    if (doc.contains("endpoint")) {
      config.endpoint.base_url_template = doc.at("endpoint").get<std::string>();
    }
    if (doc.contains("ttl_seconds")) {
      config.ttl = std::chrono::seconds(doc.at("ttl_seconds").get<long long>());
    }
    if (doc.contains("timeout_seconds")) {
      config.endpoint.timeout = std::chrono::milliseconds(
          static_cast<long long>(doc.at("timeout_seconds").get<double>() * 1000.0));
    }
    if (doc.contains("max_retries")) config.endpoint.max_retries = doc.at("max_retries").get<int>();
    if (doc.contains("bind")) config.bind = doc.at("bind").get<std::string>();
    if (doc.contains("port")) config.port = doc.at("port").get<int>();
    if (doc.contains("default_period")) config.default_period = doc.at("default_period").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::invalid_config, fmt::format("config has a mistyped key: {}", e.what()));
  }

  config.endpoint.validate();
  if (config.ttl.count() < 0) throw Error(ErrorCode::invalid_config, "ttl_seconds must be >= 0");
  if (config.port < 0 || config.port > 65535) {
    throw Error(ErrorCode::invalid_config, fmt::format("port {} out of range", config.port));
  }
  if (config.default_period < 1) {
    throw Error(ErrorCode::invalid_period, "default_period must be a positive integer");
  }
  return config;
}

AppConfig load_app_config(const std::optional<std::filesystem::path>& path) {
  AppConfig config;
  const auto file = path.value_or(default_config_path());
  std::ifstream in(file);
  if (in) {
    std::stringstream text;
    text << in.rdbuf();
    config = parse_app_config(text.str());
  } else if (path) {
    throw Error(ErrorCode::io_error, fmt::format("cannot read config '{}'", file.string()));
  }
  if (const char* endpoint = std::getenv(std::string(kEndpointEnv).c_str());
      endpoint && *endpoint) {
    config.endpoint.base_url_template = endpoint;
    config.endpoint.validate();
  }
  return config;
}

}  // namespace movavg
