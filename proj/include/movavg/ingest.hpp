#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "movavg/frame.hpp"

namespace movavg {

enum class DateFormat { dmy_dotted, iso };

/// Accepts DD.MM.YYYY and YYYY-MM-DD. `row`, when given, is attached to the
/// unparseable-date error.
Date parse_date(std::string_view text, std::optional<std::size_t> row = std::nullopt);

/// Returns the format `text` is written in, or nothing if it matches neither.
std::optional<DateFormat> detect_date_format(std::string_view text);

struct CsvSchema {
  DateFormat detected_date_format = DateFormat::iso;
  std::string date_column_name;
  std::vector<std::string> column_names;  // after the date column
};

/// Splits one CSV line, honoring double-quoted cells.
std::vector<std::string> split_csv_line(std::string_view line, char delimiter);

/// Parses CSV text into a normalized frame. Rows may come in any order.
/// Errors carry the 1-based line number (header = line 1) and column name.
TimeSeriesFrame load_csv(std::istream& in, std::string source_label = {});
TimeSeriesFrame load_csv_text(std::string_view text, std::string source_label = {});
TimeSeriesFrame load_csv_file(const std::filesystem::path& path);

/// Canonicalizes OHLCV column names and, unless all of Open/High/Low/Close
/// are present, copies the first data column into each of them.
TimeSeriesFrame normalize_columns(const TimeSeriesFrame& frame);

/// Writes ISO dates and shortest round-trip numbers; undefined cells are empty.
void write_csv(const TimeSeriesFrame& frame, std::ostream& out);
std::string to_csv_string(const TimeSeriesFrame& frame);

/// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

}  // namespace movavg
