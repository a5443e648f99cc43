#pragma once

#include <stdexcept>
#include <string>

namespace qwalk {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class InvalidParameterError : public Error {
public:
    using Error::Error;
};

class InvalidConfigError : public Error {
public:
    using Error::Error;
};

// Amplitude would be shifted past the edge of the lattice; this means
// n_t > n_max somewhere upstream.
class BoundaryOverflowError : public Error {
public:
    using Error::Error;
};

class DegenerateStateError : public Error {
public:
    using Error::Error;
};

class InsufficientDataError : public Error {
public:
    using Error::Error;
};

class NoKinkError : public Error {
public:
    using Error::Error;
};

class BoundaryMaximumError : public Error {
public:
    using Error::Error;
};

class RegimeCoverageError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class InvalidBandError : public Error {
public:
    using Error::Error;
};

class DegenerateSampleError : public Error {
public:
    using Error::Error;
};

class TrainingFailedError : public Error {
public:
    using Error::Error;
};

class NoTransitionError : public Error {
public:
    using Error::Error;
};

// Configuration file problems (bad syntax, unknown key, invalid value).
class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace qwalk
