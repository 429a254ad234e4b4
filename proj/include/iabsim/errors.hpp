#pragma once

#include <stdexcept>
#include <string>

namespace iabsim {

/// Base class for every error raised by the simulator.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numeric argument is outside its documented domain.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// A link whose two endpoints coincide.
class DegenerateLink : public Error {
 public:
  using Error::Error;
};

/// Association was requested on a network without any candidate server.
class EmptyNetwork : public Error {
 public:
  using Error::Error;
};

/// Coverage of a realization with no UEs.
class UndefinedCoverage : public Error {
 public:
  using Error::Error;
};

/// Every Monte Carlo realization was discarded.
class EstimationError : public Error {
 public:
  using Error::Error;
};

/// Scenario key unknown, missing or out of range.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file (building footprints, scenario JSON).
class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace iabsim
