#pragma once

#include <stdexcept>
#include <string>

namespace bmk {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PositivityViolation : Error {
  using Error::Error;
};
struct ConvexityViolation : Error {
  double margin = 0.0;
  ConvexityViolation(const std::string& msg, double m) : Error(msg), margin(m) {}
};
struct NotOriginSymmetric : Error {
  using Error::Error;
};
struct DegenerateBody : Error {
  using Error::Error;
};
struct AssemblyAsymmetry : Error {
  using Error::Error;
};
struct EigensolveFailure : Error {
  using Error::Error;
};
struct CrossCheckMismatch : Error {
  using Error::Error;
};
struct StructureViolation : Error {
  double residual = 0.0;
  StructureViolation(const std::string& msg, double r) : Error(msg), residual(r) {}
};
struct NewtonDivergence : Error {
  using Error::Error;
};
struct JacobianSingular : Error {
  using Error::Error;
};
struct ContinuationStall : Error {
  using Error::Error;
};
struct ZeroField : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace bmk
