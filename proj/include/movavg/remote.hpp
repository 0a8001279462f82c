#pragma once

#include <chrono>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "movavg/frame.hpp"

namespace movavg {

inline constexpr std::string_view kSymbolPlaceholder = "{symbol}";
inline constexpr std::string_view kDefaultEndpoint =
    "https://stooq.com/q/d/l/?s={symbol}&i=d";

struct RemoteEndpointConfig {
  std::string base_url_template = std::string(kDefaultEndpoint);
  std::chrono::milliseconds timeout{10'000};
  int max_retries = 2;
  // Doubles after every failed attempt: 0.5 s, 1 s, ...
  std::chrono::milliseconds initial_backoff{500};
  std::size_t max_body_bytes = 50u * 1024u * 1024u;

  /// Throws invalid-config unless the template holds exactly one placeholder.
  void validate() const;

  /// Substitutes the lowercase rendered symbol ("ebay.us") into the template.
  std::string url_for(const SymbolRef& symbol) const;
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

/// Performs one GET. Transport-level failures (DNS, connect, timeout, size cap)
/// throw network-failure; payload-too-large for bodies over the cap.
using HttpGet =
    std::function<HttpResponse(const std::string& url, const RemoteEndpointConfig&)>;

HttpResponse http_get(const std::string& url, const RemoteEndpointConfig& config);

/// Downloads the symbol's daily history and parses it as CSV.
///
/// Transport failures and 5xx responses are retried up to `max_retries` times
/// with exponential backoff. A 404, an empty body or a "No data" body is an
/// unknown-symbol error; an unparseable body is malformed-payload.
TimeSeriesFrame fetch(const SymbolRef& symbol, const RemoteEndpointConfig& config,
                      const HttpGet& get = http_get);

struct CachedFrame {
  std::shared_ptr<const TimeSeriesFrame> frame;
  bool stale = false;
};

/// In-memory quote store keyed by rendered symbol.
///
/// Entries younger than the TTL are served without a request. Concurrent misses
/// on one key share a single fetch. When a refresh fails and an expired entry
/// exists, that entry is returned flagged stale instead of the error.
class QuoteCache {
 public:
  using Clock = std::function<std::chrono::steady_clock::time_point()>;

  explicit QuoteCache(std::chrono::seconds ttl = std::chrono::minutes(15),
                      HttpGet transport = http_get,
                      Clock clock = [] { return std::chrono::steady_clock::now(); });

  CachedFrame get_or_fetch(const SymbolRef& symbol,
                           const RemoteEndpointConfig& config);

  std::chrono::seconds ttl() const noexcept { return ttl_; }
  std::size_t size() const;

 private:
  using FramePtr = std::shared_ptr<const TimeSeriesFrame>;

  struct Entry {
    FramePtr frame;
    std::chrono::steady_clock::time_point fetched_at;
  };

  CachedFrame stale_or_rethrow(const std::string& key);

  std::chrono::seconds ttl_;
  HttpGet transport_;
  Clock clock_;
  mutable std::mutex mutex_;
  std::map<std::string, Entry> entries_;
  std::map<std::string, std::shared_future<FramePtr>> in_flight_;
};

inline CachedFrame get_or_fetch(QuoteCache& cache, const SymbolRef& symbol,
                                const RemoteEndpointConfig& config) {
  return cache.get_or_fetch(symbol, config);
}

}  // namespace movavg
