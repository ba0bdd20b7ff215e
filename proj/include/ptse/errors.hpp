#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ptse {

//! Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct InvalidArgument : Error {
  using Error::Error;
};

//! A likelihood row assigns zero density to an observation under every state.
struct DegenerateLikelihood : Error {
  using Error::Error;
};

//! Fixed-point iteration hit its cap without meeting tolerance.
struct NoConvergence : Error {
  NoConvergence(const std::string& msg, Eigen::VectorXd last, double res)
    : Error(msg)
    , last_iterate(std::move(last))
    , residual(res)
  {}
  Eigen::VectorXd last_iterate;
  double residual;
};

struct EmptyCandidates : Error {
  using Error::Error;
};

struct SingularSystem : Error {
  using Error::Error;
};

struct MissingData : Error {
  using Error::Error;
};

struct ShapeMismatch : Error {
  using Error::Error;
};

struct NonFiniteLikelihood : Error {
  using Error::Error;
};

struct MalformedDocument : Error {
  using Error::Error;
};

struct SchemaVersionMismatch : Error {
  using Error::Error;
};

struct ZeroDenominator : Error {
  using Error::Error;
};

struct BracketFailure : Error {
  using Error::Error;
};

//! File/CSV level error; message carries path and line number.
struct ParseError : Error {
  using Error::Error;
};

} // namespace ptse
