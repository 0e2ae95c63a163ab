#pragma once

#include <stdexcept>
#include <string>

namespace cropweed {

/// Base of every error raised by the library.
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

/// Invalid argument value (out-of-range parameter, dimension mismatch, unknown label).
class ParameterError : public Error {
  public:
    using Error::Error;
};

/// Input too small or too uniform for the requested computation.
class DegenerateInputError : public Error {
  public:
    using Error::Error;
};

class OutOfBoundsError : public Error {
  public:
    using Error::Error;
};

class DatasetLayoutError : public Error {
  public:
    using Error::Error;
};

class DatasetError : public Error {
  public:
    using Error::Error;
};

class ExtractionError : public Error {
  public:
    using Error::Error;
};

class ConfigurationError : public Error {
  public:
    using Error::Error;
};

class DeserializationError : public Error {
  public:
    using Error::Error;
};

}  // namespace cropweed
