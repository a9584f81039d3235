#pragma once

#include <stdexcept>
#include <string>

namespace opseq {

// Every failure raised by the library derives from Error so the CLI can map
// it onto an exit code in one place.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input or configuration problems (CLI exit code 2).
class InputError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public InputError {
 public:
  using InputError::InputError;
};

class IndexError : public InputError {
 public:
  using InputError::InputError;
};

class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

class VocabError : public InputError {
 public:
  using InputError::InputError;
};

class EmptyInputError : public InputError {
 public:
  using InputError::InputError;
};

class SequenceTooShortError : public InputError {
 public:
  using InputError::InputError;
};

class EmptySampleError : public InputError {
 public:
  using InputError::InputError;
};

class InsufficientDataError : public InputError {
 public:
  using InputError::InputError;
};

class FormatError : public InputError {
 public:
  using InputError::InputError;
};

// Runtime failures (CLI exit code 3).
class RuntimeFailure : public Error {
 public:
  using Error::Error;
};

class EvaluationError : public RuntimeFailure {
 public:
  using RuntimeFailure::RuntimeFailure;
};

class TrainingDivergedError : public RuntimeFailure {
 public:
  using RuntimeFailure::RuntimeFailure;
};

}  // namespace opseq
