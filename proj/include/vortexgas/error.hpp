#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vortexgas {

enum class ErrorCode {
  invalid_argument,
  coincident_vortices,
  unsupported_geometry,
  inadmissible,
  singular_evaluation,
  quadrature_failure,
  step_underflow,
  model_validation,
  degenerate_model,
  config_parse,
  io_failure,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::coincident_vortices: return "coincident_vortices";
    case ErrorCode::unsupported_geometry: return "unsupported_geometry";
    case ErrorCode::inadmissible: return "inadmissible";
    case ErrorCode::singular_evaluation: return "singular_evaluation";
    case ErrorCode::quadrature_failure: return "quadrature_failure";
    case ErrorCode::step_underflow: return "step_underflow";
    case ErrorCode::model_validation: return "model_validation";
    case ErrorCode::degenerate_model: return "degenerate_model";
    case ErrorCode::config_parse: return "config_parse";
    case ErrorCode::io_failure: return "io_failure";
  }
  return "unknown";
}

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace vortexgas
