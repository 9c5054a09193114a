#pragma once

#include <stdexcept>
#include <string>

namespace thzart {

/// Input outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Normals meeting at a corner cancel out, so no averaged normal exists.
class DegenerateCornerError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Ray travels tangentially to an interface; refraction is undefined.
class GrazingIncidenceError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Scan geometry cannot support the requested operation.
class GeometryError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Invalid user configuration (bad flags, malformed manifest, unknown keys).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Unreadable or malformed data files.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// No usable measurement left after filtering.
class EmptyDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace thzart
