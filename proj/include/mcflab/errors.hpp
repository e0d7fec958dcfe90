#pragma once

#include <stdexcept>
#include <string>

namespace mcflab {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ArgumentError : public Error {
public:
  using Error::Error;
};

class MalformedCurveError : public Error {
public:
  using Error::Error;
};

class DegenerateGeometryError : public Error {
public:
  using Error::Error;
};

/// Query point has no unique nearest point on the curve (e.g. a focal point).
class AmbiguousProjectionError : public Error {
public:
  using Error::Error;
};

class ExtinctError : public Error {
public:
  using Error::Error;
};

/// The weak interface left the graph regime over the shifted circle.
class RegimeError : public Error {
public:
  using Error::Error;
};

class StepRejectedError : public Error {
public:
  StepRejectedError(const std::string& what, double suggested_dt)
      : Error(what), suggested_dt_(suggested_dt) {}
  double suggested_dt() const noexcept { return suggested_dt_; }

private:
  double suggested_dt_;
};

class TopologyError : public Error {
public:
  using Error::Error;
};

class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& what, double last_residual)
      : Error(what), last_residual_(last_residual) {}
  double last_residual() const noexcept { return last_residual_; }

private:
  double last_residual_;
};

class ReportError : public Error {
public:
  using Error::Error;
};

}  // namespace mcflab
