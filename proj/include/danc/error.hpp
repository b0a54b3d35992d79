#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace danc {

// Base class for everything the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed scenario, unknown tag, unsupported family.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Vector / matrix dimension mismatch.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class InvalidPlanError : public Error {
 public:
  using Error::Error;
};

class InvalidFilterError : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Lemma 2 hypothesis not met by the supplied sequences.
class HypothesisError : public Error {
 public:
  using Error::Error;
};

class TraceFormatError : public Error {
 public:
  using Error::Error;
};

class InternalError : public Error {
 public:
  using Error::Error;
};

// g(x) <= 0 observed during simulation.
class GainSignError : public Error {
 public:
  GainSignError(const std::string& what, double time)
      : Error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

// Non-finite derivative or state component past the blowup threshold.
class NumericBlowupError : public Error {
 public:
  NumericBlowupError(const std::string& what, std::size_t step)
      : Error(what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

inline void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw ShapeError(std::string(what) + ": size mismatch (" +
                     std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

}  // namespace danc
