#pragma once

#include <stdexcept>
#include <string>

namespace ppcm {

// Root of every error thrown by the library. Callers that only need to
// distinguish "bad input" from "estimation failed" can catch the two
// intermediate classes below.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class ParseError : public InputError {
 public:
  using InputError::InputError;
};

class SchemaError : public InputError {
 public:
  using InputError::InputError;
};

class InvariantError : public InputError {
 public:
  using InputError::InputError;
};

class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

class EstimationError : public Error {
 public:
  using Error::Error;
};

class DegenerateOutcomeError : public EstimationError {
 public:
  using EstimationError::EstimationError;
};

}  // namespace ppcm
