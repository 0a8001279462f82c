#pragma once

#include <atomic>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>

#include <httplib.h>

namespace support {

inline std::string fixture_path(const std::string& name) {
  return std::string(MOVAVG_FIXTURES_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string table2_csv() { return read_file(fixture_path("table2.csv")); }

/// Local HTTP server standing in for the quote endpoint. `handler` decides the
/// response; every request is counted.
class StubServer {
 public:
  using Handler = std::function<void(const httplib::Request&, httplib::Response&, int call)>;

  explicit StubServer(Handler handler) : handler_(std::move(handler)) {
    server_.Get(R"(/.*)", [this](const httplib::Request& req, httplib::Response& res) {
      const int call = ++requests_;
      {
        std::lock_guard lock(mutex_);
        paths_.push_back(req.path + (req.params.empty() ? "" : "?s=" + req.get_param_value("s")));
      }
      handler_(req, res, call);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~StubServer() {
    server_.stop();
    thread_.join();
  }

  int port() const { return port_; }
  int requests() const { return requests_.load(); }
  std::string url_template() const {
    return "http://127.0.0.1:" + std::to_string(port_) + "/q/d/l/?s={symbol}&i=d";
  }
  std::vector<std::string> paths() const {
    std::lock_guard lock(mutex_);
    return paths_;
  }

 private:
  Handler handler_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> requests_{0};
  mutable std::mutex mutex_;
  std::vector<std::string> paths_;
};

}  // namespace support
