#include "movavg/remote.hpp"

#include <thread>

#include <fmt/format.h>
#include <httplib.h>

#include "movavg/error.hpp"
#include "movavg/ingest.hpp"

namespace movavg {

namespace {

std::string lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string target;  // /path?query
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::invalid_config, fmt::format("invalid URL '{}'", url));
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

bool is_no_data(std::string_view body) {
  const std::string text = trim(body);
  return text.empty() || lower(text).starts_with("no data");
}

}  // namespace

void RemoteEndpointConfig::validate() const {
  const auto first = base_url_template.find(kSymbolPlaceholder);
  if (first == std::string::npos ||
      base_url_template.find(kSymbolPlaceholder, first + 1) != std::string::npos) {
    throw Error(ErrorCode::invalid_config,
                fmt::format("endpoint template '{}' must contain exactly one {}",
                            base_url_template, kSymbolPlaceholder));
  }
  if (max_retries < 0) {
    throw Error(ErrorCode::invalid_config, "max_retries must be non-negative");
  }
}

std::string RemoteEndpointConfig::url_for(const SymbolRef& symbol) const {
  validate();
  std::string url = base_url_template;
  url.replace(url.find(kSymbolPlaceholder), kSymbolPlaceholder.size(),
              lower(symbol.render()));
  return url;
}

HttpResponse http_get(const std::string& url, const RemoteEndpointConfig& config) {
  const auto [origin, target] = split_url(url);
  httplib::Client client(origin);
  if (!client.is_valid()) {
    throw Error(ErrorCode::network_failure,
                fmt::format("cannot create HTTP client for '{}'", origin));
  }
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config.timeout);
  const auto usecs =
      std::chrono::duration_cast<std::chrono::microseconds>(config.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_follow_location(true);

  HttpResponse out;
  bool too_large = false;
  auto result = client.Get(
      target, httplib::Headers{},
      [&](const httplib::Response& res) {
        out.status = res.status;
        return true;
      },
      [&](const char* data, std::size_t len) {
        if (out.body.size() + len > config.max_body_bytes) {
          too_large = true;
          return false;
        }
        out.body.append(data, len);
        return true;
      });
  if (too_large) {
    throw Error(ErrorCode::payload_too_large,
                fmt::format("response from {} exceeds {} bytes", origin,
                            config.max_body_bytes));
  }
  if (!result) {
    throw Error(ErrorCode::network_failure,
                fmt::format("GET {} failed: {}", url, httplib::to_string(result.error())));
  }
  return out;
}

TimeSeriesFrame fetch(const SymbolRef& symbol, const RemoteEndpointConfig& config,
                      const HttpGet& get) {
  const std::string url = config.url_for(symbol);
  auto backoff = config.initial_backoff;
  std::string last_failure;

  for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    HttpResponse response;
    try {
      response = get(url, config);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::network_failure) throw;
      last_failure = e.what();
      continue;
    }
    if (response.status >= 500) {
      last_failure = fmt::format("GET {} returned HTTP {}", url, response.status);
      continue;
    }
    if (response.status == 404 || (response.status >= 200 && response.status < 300 &&
                                    is_no_data(response.body))) {
      throw Error(ErrorCode::unknown_symbol,
                  fmt::format("no data available for symbol {}", symbol.render()));
    }
    if (response.status < 200 || response.status >= 300) {
      throw Error(ErrorCode::network_failure,
                  fmt::format("GET {} returned HTTP {}", url, response.status));
    }
    try {
      return load_csv_text(response.body, symbol.render());
    } catch (const Error& e) {
      throw Error(ErrorCode::malformed_payload,
                  fmt::format("malformed data for {}: {}", symbol.render(), e.what()),
                  e.row(), e.column());
    }
  }
  throw Error(ErrorCode::network_failure,
              fmt::format("fetching {} failed after {} attempts: {}", symbol.render(),
                          config.max_retries + 1, last_failure));
}

QuoteCache::QuoteCache(std::chrono::seconds ttl, HttpGet transport, Clock clock)
    : ttl_(ttl), transport_(std::move(transport)), clock_(std::move(clock)) {}

std::size_t QuoteCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

CachedFrame QuoteCache::stale_or_rethrow(const std::string& key) {
  {
    std::lock_guard lock(mutex_);
    if (auto it = entries_.find(key); it != entries_.end()) {
      return {it->second.frame, true};
    }
  }
  throw;
}

CachedFrame QuoteCache::get_or_fetch(const SymbolRef& symbol,
                                     const RemoteEndpointConfig& config) {
  const std::string key = symbol.render();
  std::shared_future<FramePtr> pending;
  std::promise<FramePtr> promise;
  bool leader = false;
  {
    std::lock_guard lock(mutex_);
    if (auto it = entries_.find(key);
        it != entries_.end() && clock_() - it->second.fetched_at < ttl_) {
      return {it->second.frame, false};
    }
    if (auto it = in_flight_.find(key); it != in_flight_.end()) {
      pending = it->second;
    } else {
      pending = promise.get_future().share();
      in_flight_.emplace(key, pending);
      leader = true;
    }
  }

  if (!leader) {
    try {
      return {pending.get(), false};
    } catch (...) {
      return stale_or_rethrow(key);
    }
  }

  try {
    auto frame = std::make_shared<const TimeSeriesFrame>(fetch(symbol, config, transport_));
    {
      std::lock_guard lock(mutex_);
      entries_[key] = Entry{frame, clock_()};
      in_flight_.erase(key);
    }
    promise.set_value(frame);
    return {frame, false};
  } catch (...) {
    {
      std::lock_guard lock(mutex_);
      in_flight_.erase(key);
    }
    promise.set_exception(std::current_exception());
    return stale_or_rethrow(key);
  }
}

}  // namespace movavg
