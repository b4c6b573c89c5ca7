#pragma once

#include <stdexcept>

namespace emg {

// Runtime failure: malformed data, I/O, numerical degeneracy.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad configuration or command-line usage. The CLI maps this to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace emg
