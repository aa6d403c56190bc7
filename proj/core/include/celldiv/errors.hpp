#pragma once

#include <stdexcept>

namespace celldiv {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vertex list does not describe a strictly convex polygon with positive area.
class InvalidPolygon : public Error {
 public:
  using Error::Error;
};

/// A split produced a sliver piece; the caller should resample the line.
class DegenerateSplit : public Error {
 public:
  using Error::Error;
};

class ContainmentViolation : public Error {
 public:
  using Error::Error;
};

/// A single replicate could not be completed (resampling exhausted, event cap).
class ReplicateAborted : public Error {
 public:
  using Error::Error;
};

class InsufficientSamples : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace celldiv
