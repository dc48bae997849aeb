#pragma once

#include <stdexcept>
#include <string>

namespace topoprune {

// Each error class maps onto one CLI exit code (see tools/topoprune.cpp).

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad configuration value or out-of-range parameter (exit code 2).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Operation precondition violated by a parameter, e.g. k >= N.
class ParameterError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// Input data problems (exit code 3).
class DataError : public Error {
public:
    using Error::Error;
};

class FormatError : public DataError {
public:
    using DataError::DataError;
};

class ShapeError : public DataError {
public:
    using DataError::DataError;
};

class IoError : public DataError {
public:
    using DataError::DataError;
};

/// Non-finite intermediate values (exit code 4).
class NumericError : public Error {
public:
    using Error::Error;
};

}  // namespace topoprune
