#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rdeg {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A metric is undefined for the given samples (empty or single-class input).
class MetricError : public Error {
 public:
  using Error::Error;
};

class ManifestError : public Error {
 public:
  using Error::Error;
};

/// The external process died, could not be launched, or stopped answering.
class DetectorError : public Error {
 public:
  DetectorError(const std::string& what, std::size_t completed)
      : Error(what), completed_(completed) {}

  /// Items that received a valid response before the failure.
  std::size_t completed() const noexcept { return completed_; }

 private:
  std::size_t completed_ = 0;
};

/// The external process answered with something the protocol forbids.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

class MergeError : public Error {
 public:
  using Error::Error;
};

}  // namespace rdeg
