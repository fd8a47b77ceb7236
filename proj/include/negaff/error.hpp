#pragma once

#include <stdexcept>
#include <string>

namespace negaff {

// Fatal pipeline error. Recoverable problems (bad lines, invalid UTF-8,
// per-item translation failures) are counted in diagnostics instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

[[noreturn]] inline void fail(const std::string& message) { throw Error(message); }

}  // namespace negaff
