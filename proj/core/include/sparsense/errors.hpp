#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sparsense {

/// Base class for every error thrown by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameter values (negative sparsity, empty grids, bad config keys, ...).
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

/// Dimension mismatches and degenerate shapes.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Exhaustive enumeration would exceed the configured cap.
class InstanceTooLargeError : public Error {
 public:
  using Error::Error;
};

/// A sample with zero input row and zero error cannot define a step-size.
class DegenerateSampleError : public Error {
 public:
  using Error::Error;
};

/// A closed-form denominator is (numerically) zero.
class SingularParametersError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver produced a non-finite or runaway value.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::size_t iteration)
      : Error(what), iteration_(iteration) {}
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_ = 0;
};

/// A least-squares subproblem lost rank.
class RankError : public Error {
 public:
  RankError(const std::string& what, std::size_t iteration)
      : Error(what), iteration_(iteration) {}
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_ = 0;
};

/// File could not be read or written; remembers the offending path.
class FileError : public Error {
 public:
  FileError(const std::string& what, std::string path)
      : Error(what + ": " + path), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace sparsense
