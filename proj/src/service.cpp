#include "movavg/service.hpp"

#include <algorithm>
#include <mutex>

#include <fmt/format.h>
#include <httplib.h>
#include <json.hpp>

#include "movavg/error.hpp"
#include "movavg/indicators.hpp"
#include "movavg/ingest.hpp"

namespace movavg {

namespace {

using nlohmann::json;

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::unknown_column:
    case ErrorCode::unknown_frame:
    case ErrorCode::unknown_symbol:
      return 404;
    case ErrorCode::network_failure:
    case ErrorCode::malformed_payload:
      return 502;
    case ErrorCode::payload_too_large:
      return 413;
    case ErrorCode::io_error:
      return 500;
    default:
      return 400;
  }
}

json number_or_null(double v) { return is_defined(v) ? json(v) : json(nullptr); }

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code,
                std::string_view message, const Error* detail = nullptr) {
  json err = {{"code", code}, {"message", message}};
  if (detail && detail->row()) err["row"] = *detail->row();
  if (detail && detail->column()) err["column"] = *detail->column();
  send_json(res, status, {{"error", err}});
}

json summary(const std::string& name, const TimeSeriesFrame& frame, bool stale = false) {
  json out = {{"name", name},
              {"row_count", frame.row_count()},
              {"columns", frame.column_names()},
              {"source", frame.source_label()},
              {"stale", stale}};
  if (frame.row_count() > 0) {
    out["date_range"] = {{"from", format_iso(frame.dates().front())},
                         {"to", format_iso(frame.dates().back())}};
  } else {
    out["date_range"] = nullptr;
  }
  return out;
}

std::shared_ptr<const TimeSeriesFrame> require_frame(const SessionState& session,
                                                     const std::string& name) {
  auto frame = session.get(name);
  if (!frame) {
    throw Error(ErrorCode::unknown_frame, fmt::format("no frame named '{}'", name));
  }
  return frame;
}

std::optional<Date> date_param(const httplib::Request& req, const char* key) {
  if (!req.has_param(key)) return std::nullopt;
  try {
    return parse_date(req.get_param_value(key));
  } catch (const Error& e) {
    throw Error(ErrorCode::invalid_range,
                fmt::format("parameter '{}': {}", key, e.what()));
  }
}

}  // namespace

SessionState::SessionState(int default_period, std::chrono::seconds ttl,
                           HttpGet transport)
    : default_period_(default_period), cache_(ttl, std::move(transport)) {}

void SessionState::put(const std::string& name,
                       std::shared_ptr<const TimeSeriesFrame> frame) {
  std::unique_lock lock(mutex_);
  frames_[name] = std::move(frame);
}

std::shared_ptr<const TimeSeriesFrame> SessionState::get(const std::string& name) const {
  std::shared_lock lock(mutex_);
  auto it = frames_.find(name);
  return it == frames_.end() ? nullptr : it->second;
}

std::vector<std::string> SessionState::names() const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [name, _] : frames_) out.push_back(name);
  return out;
}

void SessionState::set_default_period(int period) {
  if (period < 1) {
    throw Error(ErrorCode::invalid_period,
                fmt::format("default_period must be a positive integer, got {}", period));
  }
  default_period_.store(period);
}

Service::Service(ServiceOptions options, HttpGet transport)
    : options_(std::move(options)),
      session_(options_.app.default_period, options_.app.ttl, std::move(transport)),
      server_(std::make_unique<httplib::Server>()) {
  options_.app.endpoint.validate();
  install_routes();
}

Service::~Service() { stop(); }

void Service::install_routes() {
  auto& srv = *server_;
  srv.set_payload_max_length(options_.max_upload_bytes);
  // httplib's default enables SO_REUSEPORT, which would let a second instance
  // share the port instead of failing.
  srv.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });

  srv.set_exception_handler([](const httplib::Request&, httplib::Response& res,
                               std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const Error& e) {
      send_error(res, status_for(e.code()), to_string(e.code()), e.what(), &e);
    } catch (const std::exception& e) {
      send_error(res, 500, "internal", e.what());
    }
  });

  srv.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
    switch (res.status) {
      case 404: send_error(res, 404, "not-found", "no such endpoint"); break;
      case 413: send_error(res, 413, "payload-too-large", "upload exceeds the size cap"); break;
      default:
        send_error(res, res.status, "http-error", httplib::status_message(res.status));
    }
    return httplib::Server::HandlerResponse::Handled;
  });

  srv.Post("/api/frames", [this](const httplib::Request& req, httplib::Response& res) {
    std::string name = req.get_param_value("name");
    std::string body;
    if (req.is_multipart_form_data()) {
      if (name.empty() && req.has_file("name")) name = trim(req.get_file_value("name").content);
      if (req.has_file("file")) {
        const auto file = req.get_file_value("file");
        body = file.content;
        if (name.empty()) name = std::filesystem::path(file.filename).stem().string();
      } else {
        throw Error(ErrorCode::bad_request, "multipart upload needs a 'file' field");
      }
    } else {
      body = req.body;
    }
    name = trim(name);
    if (name.empty()) throw Error(ErrorCode::bad_request, "missing frame name");

    auto frame = std::make_shared<const TimeSeriesFrame>(load_csv_text(body, name));
    session_.put(name, frame);
    send_json(res, 201, summary(name, *frame));
  });

  srv.Get("/api/frames", [this](const httplib::Request&, httplib::Response& res) {
    json list = json::array();
    for (const auto& name : session_.names()) {
      if (auto frame = session_.get(name)) list.push_back(summary(name, *frame));
    }
    send_json(res, 200, {{"frames", list}});
  });

  srv.Get(R"(/api/frames/([^/]+))", [this](const httplib::Request& req,
                                            httplib::Response& res) {
    const std::string name = req.matches[1];
    const auto frame = require_frame(session_, name);
    const auto from = date_param(req, "from");
    const auto to = date_param(req, "to");
    if (from && to && *from > *to) {
      throw Error(ErrorCode::invalid_range,
                  fmt::format("from {} is after to {}", format_iso(*from), format_iso(*to)));
    }

    json rows = json::array();
    const auto dates = frame->dates();
    for (std::size_t r = 0; r < dates.size(); ++r) {
      if ((from && dates[r] < *from) || (to && dates[r] > *to)) continue;
      json row = {{"date", format_iso(dates[r])}};
      for (const auto& col : frame->columns()) row[col.name] = number_or_null(col.values[r]);
      rows.push_back(std::move(row));
    }
    send_json(res, 200, {{"name", name}, {"columns", frame->column_names()}, {"rows", rows}});
  });

  srv.Get(R"(/api/frames/([^/]+)/indicators)", [this](const httplib::Request& req,
                                                       httplib::Response& res) {
    const std::string name = req.matches[1];
    const int period = session_.default_period();
    const auto specs = req.has_param("spec")
                           ? parse_indicator_specs(req.get_param_value("spec"), period)
                           : PlotConfig::defaults(period).indicators;
    const auto frame = require_frame(session_, name);

    json dates = json::array();
    for (auto d : frame->dates()) dates.push_back(format_iso(d));
    json indicators = json::array();
    for (const auto& spec : specs) {
      const auto series = compute_indicator(*frame, spec);
      json values = json::array();
      for (double v : series.values) values.push_back(number_or_null(v));
      indicators.push_back({{"label", spec.label()},
                            {"kind", to_string(spec.kind)},
                            {"period", spec.period},
                            {"column", spec.source_column},
                            {"warmup_len", series.warmup_len},
                            {"values", std::move(values)}});
    }
    send_json(res, 200, {{"name", name}, {"dates", dates}, {"indicators", indicators}});
  });

  srv.Get(R"(/api/quotes/([^/]+))", [this](const httplib::Request& req,
                                            httplib::Response& res) {
    const auto symbol = parse_symbol(std::string(req.matches[1]));
    const auto cached = session_.quote_cache().get_or_fetch(symbol, options_.app.endpoint);
    const std::string name = symbol.render();
    session_.put(name, cached.frame);
    send_json(res, 200, summary(name, *cached.frame, cached.stale));
  });

  srv.Get("/api/config", [this](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, {{"default_period", session_.default_period()}});
  });

  srv.Put("/api/config", [this](const httplib::Request& req, httplib::Response& res) {
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::bad_request, fmt::format("body is not valid JSON: {}", e.what()));
    }
    if (!body.is_object() || !body.contains("default_period") ||
        !body["default_period"].is_number_integer()) {
      throw Error(ErrorCode::invalid_period, "default_period must be a positive integer");
    }
    const auto period = body["default_period"].get<long long>();
    if (period < 1 || period > std::numeric_limits<int>::max()) {
      throw Error(ErrorCode::invalid_period,
                  fmt::format("default_period must be a positive integer, got {}", period));
    }
    session_.set_default_period(static_cast<int>(period));
    send_json(res, 200, {{"default_period", session_.default_period()}});
  });

  if (options_.static_dir && std::filesystem::is_directory(*options_.static_dir)) {
    srv.set_mount_point("/", options_.static_dir->string());
  } else {
    srv.Get("/", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(
          "<!doctype html><title>movavg</title><p>The web UI is not installed. "
          "The JSON API is available under /api/.</p>\n",
          "text/html");
    });
  }
}

int Service::bind() {
  const auto& host = options_.app.bind;
  if (options_.app.port == 0) {
    port_ = server_->bind_to_any_port(host);
  } else {
    port_ = server_->bind_to_port(host, options_.app.port) ? options_.app.port : -1;
  }
  if (port_ < 0) {
    throw Error(ErrorCode::io_error,
                fmt::format("cannot listen on {}:{}", host, options_.app.port));
  }
  return port_;
}

void Service::run() { server_->listen_after_bind(); }

int Service::start() {
  const int port = bind();
  thread_ = std::thread([this] { run(); });
  server_->wait_until_ready();
  return port;
}

void Service::stop() {
  server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace movavg
