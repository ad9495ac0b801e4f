#pragma once

#include <stdexcept>
#include <string>

namespace radsum {

// Exit codes used by the command-line tool; each error type maps to one.
enum class ExitCode : int { Ok = 0, InputError = 1, VerificationFailure = 2, CapacityError = 3 };

class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Raised when exact enumeration would exceed a configured size limit.
class CapacityError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Raised when an operation is asked for a space or mode it does not handle.
class UnsupportedError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace radsum
