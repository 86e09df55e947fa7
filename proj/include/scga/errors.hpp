#pragma once

#include <stdexcept>
#include <string>

namespace scga {

/// Registration cannot proceed: collinear clouds, rank-deficient
/// cross-covariance, or a similarly degenerate configuration.
class degenerate_error : public std::runtime_error {
 public:
  explicit degenerate_error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input file. Carries the 1-based line number when known.
class parse_error : public std::runtime_error {
 public:
  parse_error(const std::string& path, long line, const std::string& what)
      : std::runtime_error(path + ":" + std::to_string(line) + ": " + what),
        line_(line) {}
  parse_error(const std::string& path, const std::string& what)
      : std::runtime_error(path + ": " + what), line_(0) {}

  long line() const { return line_; }

 private:
  long line_;
};

}  // namespace scga
