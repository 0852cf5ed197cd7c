#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gradspec {

enum class ErrorKind {
  invalid_argument,
  dimension_mismatch,
  degenerate,        // zero gradient or parallel gradients in a stepsize formula
  cold_memory,       // retarded quantity requested before enough iterates exist
  undefined,         // zero denominator in a rational stepsize expression
  diverged,          // nonfinite objective value
  line_search_failure,
  parse_error,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace gradspec
