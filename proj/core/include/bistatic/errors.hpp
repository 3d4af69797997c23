#pragma once

#include <stdexcept>
#include <string>

namespace bistatic {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The scatterer coincides with a node, or a distance vanished.
class DegenerateGeometry : public Error {
 public:
  using Error::Error;
};

class InvalidArray : public Error {
 public:
  using Error::Error;
};

/// The position-domain Fisher information is singular or too badly
/// conditioned to invert; the position is not identifiable.
class SingularEFIM : public Error {
 public:
  using Error::Error;
};

/// No feasible beam covariance yields an identifiable position.
class InfeasibleScenario : public Error {
 public:
  using Error::Error;
};

class InvalidAlpha : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace bistatic
