#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace movavg {

enum class ErrorCode {
  unknown_column,
  malformed_symbol,
  duplicate_date,
  ragged_row,
  non_numeric_cell,
  unparseable_date,
  mixed_date_format,
  empty_file,
  no_data_columns,
  duplicate_column,
  inconsistent_ohlc,
  invalid_period,
  malformed_spec,
  unknown_kind,
  unsupported_plot_type,
  invalid_viewport,
  network_failure,
  unknown_symbol,
  malformed_payload,
  payload_too_large,
  invalid_config,
  io_error,
  unknown_frame,
  invalid_range,
  bad_request,
};

std::string_view to_string(ErrorCode code);

/// Every failure in the library is reported through this type. Ingest errors
/// carry the 1-based line number of the offending row and/or the column name.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> row = std::nullopt,
        std::optional<std::string> column = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  const std::optional<std::size_t>& row() const noexcept { return row_; }
  const std::optional<std::string>& column() const noexcept { return column_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> row_;
  std::optional<std::string> column_;
};

}  // namespace movavg
