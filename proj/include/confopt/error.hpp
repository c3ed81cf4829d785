#pragma once

#include <stdexcept>
#include <string>

namespace confopt {

// Invalid input or incompatible configuration (bad metric for n, malformed rule, ...).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File access or parse failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace confopt
