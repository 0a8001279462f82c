#include "movavg/ingest.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <iterator>
#include <map>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "movavg/error.hpp"

namespace movavg {

namespace {

constexpr std::array<std::string_view, 5> kCanonical = {kOpen, kHigh, kLow,
                                                        kClose, kVolume};

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return c >= '0' && c <= '9';
  });
}

int to_int(std::string_view s) {
  int v = 0;
  std::from_chars(s.data(), s.data() + s.size(), v);
  return v;
}

std::string canonical_name(std::string_view name) {
  for (auto canon : kCanonical) {
    if (iequals(name, canon)) return std::string(canon);
  }
  return std::string(name);
}

double parse_cell(std::string_view raw, std::size_t line, const std::string& column) {
  const std::string cell = trim(raw);
  if (cell.empty()) return kUndefined;
  double value = 0.0;
  const char* first = cell.data();
  const char* last = first + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw Error(ErrorCode::non_numeric_cell,
                fmt::format("line {}, column '{}': '{}' is not a number", line,
                            column, cell),
                line, column);
  }
  return is_defined(value) ? value : kUndefined;
}

}  // namespace

std::optional<DateFormat> detect_date_format(std::string_view text) {
  if (text.size() == 10 && text[2] == '.' && text[5] == '.' &&
      all_digits(text.substr(0, 2)) && all_digits(text.substr(3, 2)) &&
      all_digits(text.substr(6, 4))) {
    return DateFormat::dmy_dotted;
  }
  if (text.size() == 10 && text[4] == '-' && text[7] == '-' &&
      all_digits(text.substr(0, 4)) && all_digits(text.substr(5, 2)) &&
      all_digits(text.substr(8, 2))) {
    return DateFormat::iso;
  }
  return std::nullopt;
}

Date parse_date(std::string_view raw, std::optional<std::size_t> row) {
  const std::string text = trim(raw);
  const auto fail = [&]() -> Error {
    return Error(ErrorCode::unparseable_date,
                 row ? fmt::format("line {}: unparseable date '{}'", *row, text)
                     : fmt::format("unparseable date '{}'", text),
                 row);
  };
  const auto format = detect_date_format(text);
  if (!format) throw fail();

  int year = 0;
  int month = 0;
  int day = 0;
  if (*format == DateFormat::dmy_dotted) {
    day = to_int(std::string_view(text).substr(0, 2));
    month = to_int(std::string_view(text).substr(3, 2));
    year = to_int(std::string_view(text).substr(6, 4));
  } else {
    year = to_int(std::string_view(text).substr(0, 4));
    month = to_int(std::string_view(text).substr(5, 2));
    day = to_int(std::string_view(text).substr(8, 2));
  }
  const std::chrono::year_month_day ymd{
      std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
      std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok()) throw fail();
  return Date{ymd};
}

std::vector<std::string> split_csv_line(std::string_view line, char delimiter) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == delimiter) {
      cells.push_back(std::move(cell));
      cell.clear();
    } else {
      cell.push_back(c);
    }
  }
  cells.push_back(std::move(cell));
  return cells;
}

TimeSeriesFrame load_csv(std::istream& in, std::string source_label) {
  std::string line;
  std::size_t line_no = 0;

  // Header: first non-blank line.
  std::string header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (!trim(line).empty()) {
      header = line;
      break;
    }
  }
  if (header.empty()) throw Error(ErrorCode::empty_file, "empty CSV input");
  const std::size_t header_line = line_no;

  const char delimiter =
      header.find(',') == std::string::npos && header.find(';') != std::string::npos
          ? ';'
          : ',';

  CsvSchema schema;
  const auto header_cells = split_csv_line(header, delimiter);
  schema.date_column_name = trim(header_cells.front());
  for (std::size_t i = 1; i < header_cells.size(); ++i) {
    std::string name = canonical_name(trim(header_cells[i]));
    if (name.empty()) {
      throw Error(ErrorCode::malformed_payload,
                  fmt::format("line {}: header cell {} is empty", header_line, i + 1),
                  header_line);
    }
    for (const auto& existing : schema.column_names) {
      if (iequals(existing, name)) {
        throw Error(ErrorCode::duplicate_column,
                    fmt::format("line {}: duplicate column '{}'", header_line, name),
                    header_line, name);
      }
    }
    schema.column_names.push_back(std::move(name));
  }
  if (schema.column_names.empty()) {
    throw Error(ErrorCode::no_data_columns,
                "no data columns after the date column", header_line);
  }

  const std::size_t width = header_cells.size();
  std::vector<Date> dates;
  std::vector<std::size_t> lines;
  std::vector<Column> columns;
  for (const auto& name : schema.column_names) columns.push_back({name, {}});
  std::map<Date, std::size_t> seen;
  std::optional<DateFormat> format;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line, delimiter);
    if (cells.size() != width) {
      throw Error(ErrorCode::ragged_row,
                  fmt::format("line {}: expected {} cells, found {}", line_no,
                              width, cells.size()),
                  line_no);
    }
    const std::string date_text = trim(cells[0]);
    const auto row_format = detect_date_format(date_text);
    if (row_format && format && *row_format != *format) {
      throw Error(ErrorCode::mixed_date_format,
                  fmt::format("line {}: date '{}' uses a different format than "
                              "earlier rows", line_no, date_text),
                  line_no, schema.date_column_name);
    }
    const Date date = parse_date(date_text, line_no);
    format = row_format;
    if (auto [it, inserted] = seen.emplace(date, line_no); !inserted) {
      throw Error(ErrorCode::duplicate_date,
                  fmt::format("line {}: duplicate date {} (first seen on line {})",
                              line_no, format_iso(date), it->second),
                  line_no, schema.date_column_name);
    }
    dates.push_back(date);
    lines.push_back(line_no);
    for (std::size_t c = 0; c < columns.size(); ++c) {
      columns[c].values.push_back(parse_cell(cells[c + 1], line_no, columns[c].name));
    }
  }
  if (format) schema.detected_date_format = *format;

  // Genuine OHLC rows must be internally consistent.
  const auto index_of = [&](std::string_view name) -> std::optional<std::size_t> {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (columns[c].name == name) return c;
    }
    return std::nullopt;
  };
  const auto o = index_of(kOpen), h = index_of(kHigh), l = index_of(kLow),
             c = index_of(kClose);
  if (o && h && l && c) {
    for (std::size_t r = 0; r < dates.size(); ++r) {
      const double open = columns[*o].values[r], high = columns[*h].values[r],
                   low = columns[*l].values[r], close = columns[*c].values[r];
      if (!is_defined(open) || !is_defined(high) || !is_defined(low) ||
          !is_defined(close)) {
        continue;
      }
      if (!(low <= open && open <= high && low <= close && close <= high)) {
        throw Error(ErrorCode::inconsistent_ohlc,
                    fmt::format("line {}: OHLC values violate Low <= Open, Close "
                                "<= High", lines[r]),
                    lines[r]);
      }
    }
  }

  return normalize_columns(
      TimeSeriesFrame(std::move(dates), std::move(columns), std::move(source_label)));
}

TimeSeriesFrame load_csv_text(std::string_view text, std::string source_label) {
  std::istringstream in{std::string(text)};
  return load_csv(in, std::move(source_label));
}

TimeSeriesFrame load_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::io_error,
                fmt::format("cannot open '{}' for reading", path.string()));
  }
  return load_csv(in, path.string());
}

TimeSeriesFrame normalize_columns(const TimeSeriesFrame& frame) {
  std::vector<Column> columns = frame.columns();
  if (columns.empty()) {
    throw Error(ErrorCode::no_data_columns, "frame has no data columns");
  }
  for (auto& col : columns) col.name = canonical_name(col.name);

  const auto find = [&](std::string_view name) -> Column* {
    for (auto& col : columns) {
      if (col.name == name) return &col;
    }
    return nullptr;
  };
  const std::array<std::string_view, 4> ohlc = {kOpen, kHigh, kLow, kClose};
  const bool complete = std::all_of(ohlc.begin(), ohlc.end(),
                                    [&](auto name) { return find(name) != nullptr; });
  if (!complete) {
    const Column first = columns.front();
    for (auto name : ohlc) {
      if (first.name == name) continue;
      if (Column* existing = find(name)) {
        existing->values = first.values;
      } else {
        columns.push_back({std::string(name), first.values});
      }
    }
  }
  std::vector<Date> dates(frame.dates().begin(), frame.dates().end());
  return TimeSeriesFrame(std::move(dates), std::move(columns), frame.source_label());
}

std::string format_number(double value) {
  if (!is_defined(value)) return {};
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

namespace {

std::string quote_if_needed(const std::string& cell) {
  if (cell.find_first_of(",;\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

void write_csv(const TimeSeriesFrame& frame, std::ostream& out) {
  out << "Date";
  for (const auto& col : frame.columns()) out << ',' << quote_if_needed(col.name);
  out << '\n';
  const auto dates = frame.dates();
  for (std::size_t r = 0; r < dates.size(); ++r) {
    out << format_iso(dates[r]);
    for (const auto& col : frame.columns()) out << ',' << format_number(col.values[r]);
    out << '\n';
  }
}

std::string to_csv_string(const TimeSeriesFrame& frame) {
  std::ostringstream out;
  write_csv(frame, out);
  return out.str();
}

}  // namespace movavg
