#include "movavg/error.hpp"

namespace movavg {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::unknown_column: return "unknown-column";
    case ErrorCode::malformed_symbol: return "malformed-symbol";
    case ErrorCode::duplicate_date: return "duplicate-date";
    case ErrorCode::ragged_row: return "ragged-row";
    case ErrorCode::non_numeric_cell: return "non-numeric-cell";
    case ErrorCode::unparseable_date: return "unparseable-date";
    case ErrorCode::mixed_date_format: return "mixed-date-format";
    case ErrorCode::empty_file: return "empty-file";
    case ErrorCode::no_data_columns: return "no-data-columns";
    case ErrorCode::duplicate_column: return "duplicate-column";
    case ErrorCode::inconsistent_ohlc: return "inconsistent-ohlc";
    case ErrorCode::invalid_period: return "invalid-period";
    case ErrorCode::malformed_spec: return "malformed-spec";
    case ErrorCode::unknown_kind: return "unknown-kind";
    case ErrorCode::unsupported_plot_type: return "unsupported-plot-type";
    case ErrorCode::invalid_viewport: return "invalid-viewport";
    case ErrorCode::network_failure: return "network-failure";
    case ErrorCode::unknown_symbol: return "unknown-symbol";
    case ErrorCode::malformed_payload: return "malformed-payload";
    case ErrorCode::payload_too_large: return "payload-too-large";
    case ErrorCode::invalid_config: return "invalid-config";
    case ErrorCode::io_error: return "io-error";
    case ErrorCode::unknown_frame: return "unknown-frame";
    case ErrorCode::invalid_range: return "invalid-range";
    case ErrorCode::bad_request: return "bad-request";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message,
             std::optional<std::size_t> row, std::optional<std::string> column)
    : std::runtime_error(message),
      code_(code),
      row_(row),
      column_(std::move(column)) {}

}  // namespace movavg
