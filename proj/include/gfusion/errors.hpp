#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gfusion {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class NotPositiveError : public Error {
 public:
  using Error::Error;
};

class SingularOperatorError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A theorem hypothesis (commutation, resolution, ...) failed to hold.
class HypothesisError : public Error {
 public:
  using Error::Error;
};

class PairingError : public Error {
 public:
  using Error::Error;
};

/// A per-atom operator T* P L* L P U is not positive, so its square root is undefined.
class ControlledStructureError : public Error {
 public:
  using Error::Error;
};

class NotAFrameError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> failures)
      : Error(join(failures)), failures_(std::move(failures)) {}

  const std::vector<std::string>& failures() const noexcept { return failures_; }

 private:
  static std::string join(const std::vector<std::string>& items) {
    std::string out = "family validation failed";
    for (const auto& s : items) out += "; " + s;
    return out;
  }

  std::vector<std::string> failures_;
};

}  // namespace gfusion
