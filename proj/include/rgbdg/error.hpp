#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rgbdg {

enum class ErrorCode {
  dimension_mismatch,
  out_of_range,
  degenerate_box,
  invalid_kernel,
  invalid_config,
  malformed_header,
  truncated_payload,
  value_out_of_range,
  schema_violation,
  duplicate_scene_id,
  invalid_spec,
  zero_margin,
  io_failure,
};

std::string_view to_string(ErrorCode code);

/// Every recoverable failure in the library is reported as an Error carrying
/// a machine-checkable code; the message names the offending field or offset.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rgbdg
