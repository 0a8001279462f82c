#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>

#include "movavg/config.hpp"
#include "movavg/remote.hpp"

namespace httplib {
class Server;
}

namespace movavg {

/// Named frames plus the quote cache. All state is in memory; a restart
/// starts empty.
class SessionState {
 public:
  SessionState(int default_period, std::chrono::seconds ttl, HttpGet transport);

  /// Replaces any frame already stored under `name`.
  void put(const std::string& name, std::shared_ptr<const TimeSeriesFrame> frame);
  std::shared_ptr<const TimeSeriesFrame> get(const std::string& name) const;
  std::vector<std::string> names() const;

  int default_period() const noexcept { return default_period_.load(); }
  void set_default_period(int period);

  QuoteCache& quote_cache() noexcept { return cache_; }

 private:
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<const TimeSeriesFrame>> frames_;
  std::atomic<int> default_period_;
  QuoteCache cache_;
};

struct ServiceOptions {
  AppConfig app;
  std::optional<std::filesystem::path> static_dir;  // built web UI, served at /
  std::size_t max_upload_bytes = 50u * 1024u * 1024u;
};

/// JSON API over HTTP:
///
///   POST /api/frames                      CSV upload (multipart or raw body)
///   GET  /api/frames                      list of frame summaries
///   GET  /api/frames/{name}?from=&to=     rows as JSON
///   GET  /api/frames/{name}/indicators?spec=sma:3,wma:3:Close
///   GET  /api/quotes/{symbol}             fetch and store under the symbol
///   GET  /api/config, PUT /api/config     {"default_period": n}
///
/// Error bodies are {"error": {"code": ..., "message": ...}}.
class Service {
 public:
  explicit Service(ServiceOptions options, HttpGet transport = http_get);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds to options.app.bind:port (port 0 = OS-assigned) and returns the
  /// bound port. Throws io-error when the address is unavailable.
  int bind();

  /// Serves until stop(). Requires bind().
  void run();

  /// bind() then run() on a background thread.
  int start();
  void stop();

  int port() const noexcept { return port_; }
  SessionState& session() noexcept { return session_; }

 private:
  void install_routes();

  ServiceOptions options_;
  SessionState session_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = -1;
};

}  // namespace movavg
