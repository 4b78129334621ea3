#pragma once

#include <stdexcept>
#include <string>

namespace gridflow {

// Category of a hard failure. The CLI maps these onto exit codes, so every
// throw site has to pick the right one.
enum class ErrorKind {
  InvalidInput,  // malformed files, graph violations, bad flags
  Infeasible,    // no solution exists under the given constraints
  Budget,        // time limit or feedback-round budget exhausted
  Internal,      // invariant broken; always a bug
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace gridflow
