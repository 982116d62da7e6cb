#pragma once

#include <stdexcept>
#include <string>

namespace colreact {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// IMU samples fed out of time order.
class StreamOrderError : public Error {
 public:
  using Error::Error;
};

/// Input has no well-defined direction / plane / box (zero vectors, collinear sets).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class OutOfBoundsError : public Error {
 public:
  using Error::Error;
};

class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class PlanningFailure : public Error {
 public:
  using Error::Error;
};

/// Scenario / configuration problem. `line` is 1-based, 0 when unknown.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& msg, int line = 0) : Error(msg), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace colreact
