#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace delone {

enum class ErrorKind {
  invalid_argument,
  insufficient_data,
  window_too_small,
  needs_more_terms,
  resource_limit,
  degenerate_geometry,
  insufficient_window,
  window_incomplete,
  schema,
  io,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::insufficient_data: return "insufficient-data";
    case ErrorKind::window_too_small: return "window-too-small";
    case ErrorKind::needs_more_terms: return "needs-more-terms";
    case ErrorKind::resource_limit: return "resource-limit";
    case ErrorKind::degenerate_geometry: return "degenerate-geometry";
    case ErrorKind::insufficient_window: return "insufficient-window";
    case ErrorKind::window_incomplete: return "window-incomplete";
    case ErrorKind::schema: return "schema";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

/// The single exception type thrown by the library; `kind()` tells callers
/// which contract was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace delone
