#pragma once

#include <stdexcept>
#include <string>

namespace depthcraft {

/// Root of every exception the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or parameter combination (usage-level error).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Input is too large for the requested exact algorithm.
class SizeError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

/// A cell of a text input could not be parsed.
class ParseError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

/// Structural problem with an input file (ragged rows, missing fields).
class FormatError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

/// Feature not available for the given input (e.g. a plot that needs d = 2).
class UnsupportedError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

/// Data is rank deficient or otherwise unusable for the requested statistic.
class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

/// Linear program could not be solved reliably.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Serialized model does not match the expected schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Serialized model was written by an unsupported format version.
class MigrationError : public SchemaError {
 public:
  using SchemaError::SchemaError;
};

/// Training could not proceed (too few points, empty class after a split).
class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace depthcraft
