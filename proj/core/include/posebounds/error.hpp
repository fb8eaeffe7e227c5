#pragma once

#include <stdexcept>
#include <string>

namespace posebounds {

/// Base class for every error raised by the library. Callers that only care
/// about "the computation for this pose failed" catch this type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A joint sits on or behind the camera plane.
class NonPositiveDepth : public Error {
 public:
  using Error::Error;
};

// All points collapse onto a single location (zero scale / zero limb length).
class DegeneratePose : public Error {
 public:
  using Error::Error;
};

class InvalidScale : public Error {
 public:
  using Error::Error;
};

class RootNotCentered : public Error {
 public:
  using Error::Error;
};

class NoSolution : public Error {
 public:
  using Error::Error;
};

class SkeletonMismatch : public Error {
 public:
  using Error::Error;
};

// Brute-force search hit the edge of its search interval.
class BracketError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace posebounds
