#ifndef DYNSAMP_ERROR_HPP
#define DYNSAMP_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace dynsamp {

enum class ErrorKind {
  invalid_input,
  not_psd,
  divergent_series,
  no_convergence,
  not_a_frame,
  hypothesis_violated,
  invalid_hypothesis,
  config_error,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_input: return "invalid-input";
    case ErrorKind::not_psd: return "not-psd";
    case ErrorKind::divergent_series: return "divergent-series";
    case ErrorKind::no_convergence: return "no-convergence";
    case ErrorKind::not_a_frame: return "not-a-frame";
    case ErrorKind::hypothesis_violated: return "hypothesis-violated";
    case ErrorKind::invalid_hypothesis: return "invalid-hypothesis";
    case ErrorKind::config_error: return "config-error";
  }
  return "unknown";
}

/// Single exception type for the library; `kind()` tells callers which
/// precondition or numerical failure occurred.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace dynsamp

#endif  // DYNSAMP_ERROR_HPP
