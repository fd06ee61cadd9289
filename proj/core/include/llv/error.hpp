#pragma once

#include <stdexcept>
#include <string>

namespace llv {

/// Base class for every domain error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dimension or argument contract violated by the caller.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Class-conditional mean difference vanished at some depth.
class DegenerateConcept : public Error {
 public:
  DegenerateConcept(std::size_t depth, const std::string& what)
      : Error(what), depth_(depth) {}
  std::size_t depth() const noexcept { return depth_; }

 private:
  std::size_t depth_;
};

/// No layer has predicted influence on the concept score (||h|| ~ 0).
class UncontrollableConcept : public Error {
 public:
  using Error::Error;
};

/// Orientation probe produced no measurable shift.
class FlatResponse : public Error {
 public:
  using Error::Error;
};

/// Amplitude search could not bracket: shift is not increasing at probe scale.
class OrientationFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace llv
