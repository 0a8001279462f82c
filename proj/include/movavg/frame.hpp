#pragma once

#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace movavg {

using Date = std::chrono::sys_days;

Date make_date(int year, unsigned month, unsigned day);
std::string format_iso(Date date);

/// Missing and non-finite values are stored as NaN and treated as undefined.
inline constexpr double kUndefined = std::numeric_limits<double>::quiet_NaN();
inline bool is_defined(double value) noexcept { return std::isfinite(value); }

inline constexpr std::string_view kOpen = "Open";
inline constexpr std::string_view kHigh = "High";
inline constexpr std::string_view kLow = "Low";
inline constexpr std::string_view kClose = "Close";
inline constexpr std::string_view kVolume = "Volume";

struct Column {
  std::string name;
  std::vector<double> values;

  friend bool operator==(const Column&, const Column&);
};

/// Date-indexed table of numeric columns. Immutable once built.
///
/// The constructor sorts rows by date and rejects duplicate dates, so two
/// frames built from permutations of the same rows compare equal.
class TimeSeriesFrame {
 public:
  TimeSeriesFrame() = default;
  TimeSeriesFrame(std::vector<Date> dates, std::vector<Column> columns,
                  std::string source_label = {});

  std::span<const Date> dates() const noexcept { return dates_; }
  const std::vector<Column>& columns() const noexcept { return columns_; }
  std::size_t row_count() const noexcept { return dates_.size(); }
  const std::string& source_label() const noexcept { return source_label_; }

  bool has_column(std::string_view name) const noexcept;
  std::vector<std::string> column_names() const;

  /// Exact name match first, then a case-insensitive match.
  /// Throws unknown-column listing the available names.
  std::span<const double> column(std::string_view name) const;

  TimeSeriesFrame with_source_label(std::string label) const;

  /// Equality ignores source_label and compares values bitwise (NaN == NaN).
  friend bool operator==(const TimeSeriesFrame&, const TimeSeriesFrame&);

 private:
  const Column* find(std::string_view name) const noexcept;

  std::vector<Date> dates_;
  std::vector<Column> columns_;
  std::string source_label_;
};

inline std::span<const double> column(const TimeSeriesFrame& frame,
                                      std::string_view name) {
  return frame.column(name);
}

enum class IndicatorKind { sma, wma, ema };

std::string_view to_string(IndicatorKind kind);

struct IndicatorSpec {
  IndicatorKind kind = IndicatorKind::sma;
  int period = 1;
  std::string source_column = std::string(kClose);

  /// "SMA(3)" for the Close column, "SMA(3,Open)" otherwise.
  std::string label() const;

  friend bool operator==(const IndicatorSpec&, const IndicatorSpec&) = default;
};

/// Parses "kind[:period[:column]]" items separated by commas. A missing or
/// empty period takes `default_period`.
std::vector<IndicatorSpec> parse_indicator_specs(std::string_view text,
                                                 int default_period);

struct IndicatorSeries {
  IndicatorSpec spec;
  std::vector<double> values;
  std::size_t warmup_len = 0;
};

struct SymbolRef {
  std::string ticker;
  std::string country;

  std::string render() const { return ticker + "." + country; }
  friend bool operator==(const SymbolRef&, const SymbolRef&) = default;
};

/// Splits on the last dot, trims and uppercases both parts.
SymbolRef parse_symbol(std::string_view text);

enum class PlotType { line, candle, ohlc };

std::string_view to_string(PlotType type);
PlotType parse_plot_type(std::string_view text);

struct Viewport {
  Date x_min;
  Date x_max;
  double y_min = 0.0;
  double y_max = 0.0;
};

struct PlotConfig {
  PlotType plot_type = PlotType::line;
  std::vector<IndicatorSpec> indicators;
  std::optional<Viewport> viewport;  // nullopt = auto

  /// One SMA, WMA and EMA sharing `period`, line plot, automatic viewport.
  static PlotConfig defaults(int period);

  /// Throws invalid-viewport / invalid-period when an invariant is broken.
  void validate() const;
};

std::string trim(std::string_view text);
std::string to_upper(std::string_view text);
bool iequals(std::string_view a, std::string_view b) noexcept;

}  // namespace movavg
