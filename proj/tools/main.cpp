// movavg: compute moving averages, render charts, fetch quotes, run the service.
//
// Exit codes: 0 success, 1 runtime or data error, 2 usage error.

#include <csignal>
#include <fstream>
#include <iostream>
#include <pthread.h>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "movavg/chart.hpp"
#include "movavg/config.hpp"
#include "movavg/error.hpp"
#include "movavg/indicators.hpp"
#include "movavg/ingest.hpp"
#include "movavg/remote.hpp"
#include "movavg/service.hpp"

namespace {

using namespace movavg;

constexpr int kOk = 0;
constexpr int kRuntimeError = 1;
constexpr int kUsageError = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Runs `fn`, turning library errors into UsageError (bad arguments).
template <typename Fn>
auto as_usage(Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

void write_output(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, fmt::format("cannot open '{}' for writing", path));
  out << content;
  if (!out.flush()) throw Error(ErrorCode::io_error, fmt::format("failed writing '{}'", path));
}

std::vector<IndicatorSeries> compute_all(const TimeSeriesFrame& frame,
                                         const std::vector<IndicatorSpec>& specs) {
  std::vector<IndicatorSeries> out;
  out.reserve(specs.size());
  for (const auto& spec : specs) out.push_back(compute_indicator(frame, spec));
  return out;
}

TimeSeriesFrame indicator_table(const TimeSeriesFrame& frame,
                                const std::vector<IndicatorSeries>& series) {
  std::vector<Column> columns;
  std::set<std::string> sources;
  for (const auto& s : series) {
    const auto values = frame.column(s.spec.source_column);
    // Reuse the frame's own spelling of the column name.
    std::string name = s.spec.source_column;
    for (const auto& col : frame.columns()) {
      if (iequals(col.name, name)) name = col.name;
    }
    if (sources.insert(name).second) {
      columns.push_back({name, std::vector<double>(values.begin(), values.end())});
    }
  }
  for (const auto& s : series) columns.push_back({s.spec.label(), s.values});
  return TimeSeriesFrame({frame.dates().begin(), frame.dates().end()}, std::move(columns),
                         frame.source_label());
}

sigset_t termination_signals() {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  return set;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moving-average workbench: SMA, WMA and EMA over OHLCV data"};
  app.require_subcommand(1, 1);

  std::string config_path;
  app.add_option("--config", config_path, "Config file (JSON)");

  std::string input, symbol, output = "-", spec_text = "sma:20,wma:20,ema:20";
  std::string plot_type = "line";
  int width = 960, height = 540;

  auto* compute = app.add_subcommand("compute", "Compute indicators to CSV");
  compute->add_option("--input,-i", input, "Input CSV")->required();
  compute->add_option("--spec,-s", spec_text, "kind:period[:column], comma separated");
  compute->add_option("--output,-o", output, "Output CSV ('-' for stdout)");

  auto* plot = app.add_subcommand("plot", "Render an SVG chart");
  auto* plot_input = plot->add_option("--input,-i", input, "Input CSV");
  auto* plot_symbol = plot->add_option("--symbol", symbol, "Remote symbol, e.g. EBAY.US");
  plot_input->excludes(plot_symbol);
  plot->add_option("--spec,-s", spec_text, "kind:period[:column], comma separated");
  plot->add_option("--type,-t", plot_type, "line, candle or ohlc");
  plot->add_option("--output,-o", output, "Output SVG")->required();
  plot->add_option("--width", width)->check(CLI::Range(200, 10000));
  plot->add_option("--height", height)->check(CLI::Range(150, 10000));

  auto* fetch_cmd = app.add_subcommand("fetch", "Download daily quotes to CSV");
  fetch_cmd->add_option("symbol", symbol, "TICKER.COUNTRY")->required();
  fetch_cmd->add_option("--output,-o", output, "Output CSV ('-' for stdout)");

  std::optional<int> port;
  std::optional<std::string> bind;
  std::string static_dir;
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--port,-p", port, "Port (0 = any free port)")->check(CLI::Range(0, 65535));
  serve->add_option("--bind", bind, "Bind address");
  serve->add_option("--static", static_dir, "Directory with the built web UI");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    const AppConfig config = as_usage([&] {
      return load_app_config(config_path.empty()
                                 ? std::nullopt
                                 : std::optional<std::filesystem::path>(config_path));
    });

    if (*compute || *plot) {
      const auto specs = as_usage([&] {
        return parse_indicator_specs(spec_text, config.default_period);
      });
      PlotConfig plot_config;
      plot_config.indicators = specs;
      if (*plot) {
        plot_config.plot_type = as_usage([&] { return parse_plot_type(plot_type); });
        if (input.empty() && symbol.empty()) throw UsageError("plot needs --input or --symbol");
      }
      const SymbolRef ref = symbol.empty() ? SymbolRef{}
                                           : as_usage([&] { return parse_symbol(symbol); });

      const TimeSeriesFrame frame =
          symbol.empty() ? load_csv_file(input) : fetch(ref, config.endpoint);
      const auto series = compute_all(frame, specs);

      if (*compute) {
        write_output(output, to_csv_string(indicator_table(frame, series)));
      } else {
        ChartOptions options{width, height, frame.source_label()};
        write_output(output, render_svg(frame, series, plot_config, options));
      }
      return kOk;
    }

    if (*fetch_cmd) {
      const auto ref = as_usage([&] { return parse_symbol(symbol); });
      write_output(output, to_csv_string(fetch(ref, config.endpoint)));
      return kOk;
    }

    // serve
    ServiceOptions options{config, std::nullopt, 50u * 1024u * 1024u};
    if (port) options.app.port = *port;
    if (bind) options.app.bind = *bind;
    if (!static_dir.empty()) options.static_dir = static_dir;

    // Signals are handled by a dedicated thread so stop() runs outside a
    // signal handler. The mask is inherited by the server's worker threads.
    const sigset_t signals = termination_signals();
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    Service service(options);
    const int bound = service.bind();
    std::cout << fmt::format("Listening on http://{}:{}/", options.app.bind, bound)
              << std::endl;
    std::thread waiter([&] {
      int sig = 0;
      sigwait(&signals, &sig);
      service.stop();
    });
    service.run();
    // Unblock the waiter if the server stopped on its own.
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
    return kOk;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}
