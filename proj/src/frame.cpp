#include "movavg/frame.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <numeric>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "movavg/error.hpp"

namespace movavg {

namespace {

bool same_bits(double a, double b) noexcept {
  if (std::isnan(a) && std::isnan(b)) return true;
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

}  // namespace

Date make_date(int year, unsigned month, unsigned day) {
  return Date{std::chrono::year{year} / std::chrono::month{month} /
              std::chrono::day{day}};
}

std::string format_iso(Date date) {
  const std::chrono::year_month_day ymd{date};
  return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()),
                     static_cast<unsigned>(ymd.day()));
}

std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(first, last - first + 1));
}

std::string to_upper(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::toupper(c));
  });
  return out;
}

bool iequals(std::string_view a, std::string_view b) noexcept {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

bool operator==(const Column& a, const Column& b) {
  return a.name == b.name &&
         std::equal(a.values.begin(), a.values.end(), b.values.begin(),
                    b.values.end(), same_bits);
}

TimeSeriesFrame::TimeSeriesFrame(std::vector<Date> dates,
                                 std::vector<Column> columns,
                                 std::string source_label)
    : source_label_(std::move(source_label)) {
  for (const auto& col : columns) {
    if (col.values.size() != dates.size()) {
      throw Error(ErrorCode::ragged_row,
                  fmt::format("column '{}' has {} values for {} dates",
                              col.name, col.values.size(), dates.size()),
                  std::nullopt, col.name);
    }
  }
  for (std::size_t i = 0; i < columns.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (columns[i].name == columns[j].name) {
        throw Error(ErrorCode::duplicate_column,
                    fmt::format("duplicate column '{}'", columns[i].name),
                    std::nullopt, columns[i].name);
      }
    }
  }

  std::vector<std::size_t> order(dates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dates[a] < dates[b]; });
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (dates[order[k]] == dates[order[k - 1]]) {
      throw Error(ErrorCode::duplicate_date,
                  fmt::format("duplicate date {}", format_iso(dates[order[k]])),
                  std::max(order[k], order[k - 1]));
    }
  }

  dates_.reserve(dates.size());
  for (auto idx : order) dates_.push_back(dates[idx]);
  columns_.reserve(columns.size());
  for (auto& col : columns) {
    Column sorted{std::move(col.name), {}};
    sorted.values.reserve(order.size());
    for (auto idx : order) sorted.values.push_back(col.values[idx]);
    columns_.push_back(std::move(sorted));
  }
}

const Column* TimeSeriesFrame::find(std::string_view name) const noexcept {
  for (const auto& col : columns_) {
    if (col.name == name) return &col;
  }
  for (const auto& col : columns_) {
    if (iequals(col.name, name)) return &col;
  }
  return nullptr;
}

bool TimeSeriesFrame::has_column(std::string_view name) const noexcept {
  return find(name) != nullptr;
}

std::vector<std::string> TimeSeriesFrame::column_names() const {
  std::vector<std::string> names;
  names.reserve(columns_.size());
  for (const auto& col : columns_) names.push_back(col.name);
  return names;
}

std::span<const double> TimeSeriesFrame::column(std::string_view name) const {
  if (const auto* col = find(name)) return col->values;
  throw Error(ErrorCode::unknown_column,
              fmt::format("unknown column '{}' (available: {})", name,
                          fmt::join(column_names(), ", ")),
              std::nullopt, std::string(name));
}

TimeSeriesFrame TimeSeriesFrame::with_source_label(std::string label) const {
  TimeSeriesFrame copy = *this;
  copy.source_label_ = std::move(label);
  return copy;
}

bool operator==(const TimeSeriesFrame& a, const TimeSeriesFrame& b) {
  return a.dates_ == b.dates_ && a.columns_ == b.columns_;
}

std::string_view to_string(IndicatorKind kind) {
  switch (kind) {
    case IndicatorKind::sma: return "SMA";
    case IndicatorKind::wma: return "WMA";
    case IndicatorKind::ema: return "EMA";
  }
  return "?";
}

std::string IndicatorSpec::label() const {
  if (source_column == kClose) {
    return fmt::format("{}({})", to_string(kind), period);
  }
  return fmt::format("{}({},{})", to_string(kind), period, source_column);
}

std::vector<IndicatorSpec> parse_indicator_specs(std::string_view text,
                                                 int default_period) {
  std::vector<IndicatorSpec> specs;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    const std::string item = trim(text.substr(pos, comma - pos));
    pos = comma + 1;
    if (item.empty()) {
      throw Error(ErrorCode::malformed_spec,
                  fmt::format("empty indicator spec in '{}'", text));
    }

    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
      const auto colon = item.find(':', start);
      parts.push_back(trim(std::string_view(item).substr(
          start, colon == std::string::npos ? std::string::npos : colon - start)));
      if (colon == std::string::npos) break;
      start = colon + 1;
    }
    if (parts.size() > 3 || parts[0].empty()) {
      throw Error(ErrorCode::malformed_spec,
                  fmt::format("malformed indicator spec '{}' "
                              "(expected kind:period[:column])", item));
    }

    IndicatorSpec spec;
    const std::string kind = to_upper(parts[0]);
    if (kind == "SMA") {
      spec.kind = IndicatorKind::sma;
    } else if (kind == "WMA") {
      spec.kind = IndicatorKind::wma;
    } else if (kind == "EMA") {
      spec.kind = IndicatorKind::ema;
    } else {
      throw Error(ErrorCode::unknown_kind,
                  fmt::format("unknown indicator kind '{}' (expected sma, wma "
                              "or ema)", parts[0]));
    }

    spec.period = default_period;
    if (parts.size() >= 2 && !parts[1].empty()) {
      long long period = 0;
      const auto* first = parts[1].data();
      const auto* last = first + parts[1].size();
      const auto [ptr, ec] = std::from_chars(first, last, period);
      if (ec == std::errc::result_out_of_range) {
        throw Error(ErrorCode::invalid_period,
                    fmt::format("period '{}' out of range", parts[1]));
      }
      if (ec != std::errc{} || ptr != last) {
        throw Error(ErrorCode::malformed_spec,
                    fmt::format("period '{}' in '{}' is not an integer",
                                parts[1], item));
      }
      if (period < 1 || period > std::numeric_limits<int>::max()) {
        throw Error(ErrorCode::invalid_period,
                    fmt::format("period must be a positive integer, got {}",
                                period));
      }
      spec.period = static_cast<int>(period);
    }
    if (spec.period < 1) {
      throw Error(ErrorCode::invalid_period,
                  fmt::format("period must be a positive integer, got {}",
                              spec.period));
    }
    if (parts.size() == 3) {
      if (parts[2].empty()) {
        throw Error(ErrorCode::malformed_spec,
                    fmt::format("empty column in spec '{}'", item));
      }
      spec.source_column = parts[2];
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

SymbolRef parse_symbol(std::string_view text) {
  const auto dot = text.rfind('.');
  if (dot == std::string_view::npos) {
    throw Error(ErrorCode::malformed_symbol,
                fmt::format("malformed symbol '{}': expected TICKER.COUNTRY",
                            text));
  }
  SymbolRef ref{to_upper(trim(text.substr(0, dot))),
                to_upper(trim(text.substr(dot + 1)))};
  if (ref.ticker.empty() || ref.country.empty()) {
    throw Error(ErrorCode::malformed_symbol,
                fmt::format("malformed symbol '{}': ticker and country must be "
                            "non-empty", text));
  }
  return ref;
}

std::string_view to_string(PlotType type) {
  switch (type) {
    case PlotType::line: return "line";
    case PlotType::candle: return "candle";
    case PlotType::ohlc: return "ohlc";
  }
  return "?";
}

PlotType parse_plot_type(std::string_view text) {
  const std::string t = trim(text);
  if (iequals(t, "line")) return PlotType::line;
  if (iequals(t, "candle")) return PlotType::candle;
  if (iequals(t, "ohlc")) return PlotType::ohlc;
  throw Error(ErrorCode::unsupported_plot_type,
              fmt::format("unsupported plot type '{}' (valid: line, candle, "
                          "ohlc)", text));
}

PlotConfig PlotConfig::defaults(int period) {
  PlotConfig config;
  for (auto kind : {IndicatorKind::sma, IndicatorKind::wma, IndicatorKind::ema}) {
    config.indicators.push_back({kind, period, std::string(kClose)});
  }
  return config;
}

void PlotConfig::validate() const {
  for (const auto& spec : indicators) {
    if (spec.period < 1) {
      throw Error(ErrorCode::invalid_period,
                  fmt::format("period must be a positive integer, got {}",
                              spec.period));
    }
  }
  if (viewport) {
    if (!(viewport->x_min < viewport->x_max) ||
        !(viewport->y_min < viewport->y_max)) {
      throw Error(ErrorCode::invalid_viewport,
                  "viewport requires x_min < x_max and y_min < y_max");
    }
  }
}

}  // namespace movavg
