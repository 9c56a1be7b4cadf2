#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace jitterkit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain where a quantity is defined
/// (wavelength outside a Sellmeier window, angle outside [0, pi/2], ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent or invalid user configuration (bin width, window, flags).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. `offset()` is the byte offset of the bad record.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::uint64_t offset)
      : Error(what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// A numerical solver failed to converge or found no root.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// The data cannot support the requested estimate (no accidentals to
/// normalize against, no discernible coincidence peak, ...).
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// A fit could not be set up or is not identifiable.
class FitError : public Error {
 public:
  using Error::Error;
};

}  // namespace jitterkit
