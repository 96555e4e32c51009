#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace boon {

enum class ErrorCode {
  invalid_argument,
  invalid_distribution,
  invalid_data,
  insufficient_data,
  degenerate_pool,
  resampling_degenerate,
  // Ingestion failures raised by pool_io.
  unreadable_file,
  unknown_columns,
  malformed_rows,
  no_valid_rows,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (notably the CLI) can map it to a stable exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace boon
