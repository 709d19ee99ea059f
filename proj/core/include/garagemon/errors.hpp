#pragma once

#include <stdexcept>
#include <string>

namespace garagemon {

// Base class for all recoverable library errors. The CLI maps these to
// exit code 1; anything else escaping to main is an internal error (2).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape mismatch: non-square system, length mismatch, bad vector size.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A value violates a domain precondition (non-finite, out of range, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

// An identifier does not match the entity it was paired with.
class IdentityError : public Error {
 public:
  using Error::Error;
};

// Invalid run configuration (unknown method name, bad worker count, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

class ZeroDiagonalError : public Error {
 public:
  using Error::Error;
};

// Beacon geometry does not determine a position (collinear, rank-deficient).
class DegenerateGeometryError : public Error {
 public:
  using Error::Error;
};

// Malformed input file; message carries the location.
class ParseError : public Error {
 public:
  using Error::Error;
};

// A uniqueness or validity constraint of the registry is violated.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

// Malformed drive-command frame.
class FrameError : public Error {
 public:
  using Error::Error;
};

// A stall id that is not part of the garage map.
class MapError : public Error {
 public:
  using Error::Error;
};

class LookupTimeoutError : public Error {
 public:
  using Error::Error;
};

// Owner-lookup backend answered with something outside the protocol.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

}  // namespace garagemon
