#pragma once

#include <stdexcept>
#include <string>

namespace torelli {

enum class ErrorKind { verification, precision, input };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct VerificationError : Error {
  explicit VerificationError(const std::string& what) : Error(ErrorKind::verification, what) {}
};

struct PrecisionError : Error {
  PrecisionError(const std::string& what, double achieved)
      : Error(ErrorKind::precision, what), achieved(achieved) {}
  double achieved;
};

struct InputError : Error {
  explicit InputError(const std::string& what) : Error(ErrorKind::input, what) {}
};

struct OverflowError : Error {
  explicit OverflowError(const std::string& what) : Error(ErrorKind::verification, what) {}
};

struct DegenerateFormError : Error {
  explicit DegenerateFormError(const std::string& what) : Error(ErrorKind::verification, what) {}
};

}  // namespace torelli
