#pragma once

#include <stdexcept>
#include <string>

namespace fairmon {

/// Category of a failure; each maps to one CLI exit code.
enum class ErrorKind {
  kUsage = 1,       ///< bad arguments or configuration
  kData = 2,        ///< corrupt or mismatched input data
  kAssumption = 3,  ///< a modelling assumption was violated at runtime
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

inline Error usage_error(const std::string& what) { return {ErrorKind::kUsage, what}; }
inline Error data_error(const std::string& what) { return {ErrorKind::kData, what}; }
inline Error assumption_error(const std::string& what) {
  return {ErrorKind::kAssumption, what};
}

}  // namespace fairmon
