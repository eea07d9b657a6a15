#pragma once

#include <stdexcept>
#include <string>

namespace pushsum {

// Exception hierarchy mirrored one-to-one by the C API status codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed arguments, violated preconditions, unreadable files.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// A dense or sparse object would exceed the configured memory cap.
class CapacityError : public Error {
 public:
  CapacityError(const std::string& what, std::size_t required_bytes)
      : Error(what + " (requires " + std::to_string(required_bytes) + " bytes)"),
        required_bytes_(required_bytes) {}

  std::size_t required_bytes() const noexcept { return required_bytes_; }

 private:
  std::size_t required_bytes_;
};

// A model does not satisfy the precondition of an operation
// (e.g. a doubly-stochastic-only bound applied to a push-sum model).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace pushsum
