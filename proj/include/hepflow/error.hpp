#pragma once

#include <stdexcept>
#include <string>

namespace hepflow {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid pipeline or detector configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace hepflow
