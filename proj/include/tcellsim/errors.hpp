#pragma once

#include <stdexcept>
#include <string>

namespace tcellsim {

/// Input outside the domain of a model function (e.g. an empty lookup table).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Bad caller-supplied argument (unknown scenario id, empty sample, ...).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Integration or sampling produced a non-finite state.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input file.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Filesystem read/write failure.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace tcellsim
