#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace freqsde {

// Exit-code categories used by the CLI: 2 config, 3 numeric, 4 io.
enum class ErrorCategory : int {
  Config = 2,
  Numeric = 3,
  Io = 4,
};

// All library failures carry a stable machine-readable code (e.g.
// "CrossingQuantiles") plus a human message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message),
        category_(category),
        code_(std::move(code)) {}

  ErrorCategory category() const noexcept { return category_; }
  const std::string& code() const noexcept { return code_; }

  static Error config(std::string code, const std::string& message) {
    return Error(ErrorCategory::Config, std::move(code), message);
  }
  static Error numeric(std::string code, const std::string& message) {
    return Error(ErrorCategory::Numeric, std::move(code), message);
  }
  static Error io(std::string code, const std::string& message) {
    return Error(ErrorCategory::Io, std::move(code), message);
  }

 private:
  ErrorCategory category_;
  std::string code_;
};

}  // namespace freqsde
