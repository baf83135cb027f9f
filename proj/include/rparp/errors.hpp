#pragma once

#include <stdexcept>
#include <string>

namespace rparp {

// Bad inputs: malformed files, invalid configuration, violated preconditions.
class validation_error : public std::runtime_error {
 public:
  explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

// File contents that cannot be parsed; carries a line number when known.
class parse_error : public validation_error {
 public:
  parse_error(const std::string& msg, long line = -1)
      : validation_error(line >= 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
        line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

// Numerical failures: non-PSD matrices past the jitter ladder, optimizer
// breakdown, rejection sampler exhausting its iteration budget.
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace rparp
