#pragma once

#include <stdexcept>
#include <string>

namespace purikit {

// Base class for all library errors.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Dimension or label mismatch between operands.
class ArgumentError : public Error {
  public:
    explicit ArgumentError(const std::string& what) : Error(what) {}
};

// Requested object would exceed the configured total-dimension cap.
class CapacityError : public Error {
  public:
    explicit CapacityError(const std::string& what) : Error(what) {}
};

// A matrix required to be positive semidefinite has a significantly
// negative eigenvalue.
class NotPsdError : public Error {
  public:
    explicit NotPsdError(const std::string& what) : Error(what) {}
};

// An operation requiring a non-signalling assemblage received a
// signalling one. max_deviation carries the witnessed marginal spread.
class SignallingError : public Error {
  public:
    SignallingError(const std::string& what, double max_deviation)
        : Error(what), max_deviation(max_deviation) {}
    double max_deviation;
};

// Numerical inconsistency that signals invalid input data rather than a
// usage error (e.g. a member Choi outside the span of the marginal's
// Kraus operators).
class InconsistencyError : public Error {
  public:
    explicit InconsistencyError(const std::string& what) : Error(what) {}
};

// Malformed input file.
class ParseError : public Error {
  public:
    explicit ParseError(const std::string& what) : Error(what) {}
};

}  // namespace purikit
