#pragma once

#include <stdexcept>
#include <string>

namespace mmimo {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The channel model cannot be evaluated (e.g. zero forcing with L >= M).
class ModelError : public Error {
 public:
  using Error::Error;
};

/// A caller violated an operation's precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A power vector violates a device or base-station power budget.
class InfeasiblePowerError : public Error {
 public:
  using Error::Error;
};

/// Some device cannot meet its SINR threshold even when served alone.
class InstanceInfeasibleError : public Error {
 public:
  InstanceInfeasibleError(int device, const std::string& what)
      : Error(what), device_(device) {}
  int device() const { return device_; }

 private:
  int device_;
};

/// Pricing hit its time limit without an incumbent that prices out.
class PricingInconclusiveError : public Error {
 public:
  using Error::Error;
};

/// Malformed input document (instance file, options).
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace mmimo
