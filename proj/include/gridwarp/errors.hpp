#pragma once

#include <stdexcept>
#include <string>

namespace gridwarp {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A precondition on caller-supplied data was violated (empty sequence,
// out-of-range index, non-positive sigma, ...).
class InvalidInput : public Error {
public:
    using Error::Error;
};

// An exhaustive oracle was asked to enumerate a problem above its size guard.
class SizeGuardExceeded : public Error {
public:
    using Error::Error;
};

// The image pipeline could not recover enough grid structure to continue.
class ExtractionFailure : public Error {
public:
    using Error::Error;
};

// Degenerate projection, parallel ray/plane, point behind a ray origin.
class GeometryError : public Error {
public:
    using Error::Error;
};

// Two rays are too close to parallel for a stable least-squares point.
class IllConditioned : public GeometryError {
public:
    IllConditioned(const std::string& what, double angle_rad)
        : GeometryError(what), angle_rad_(angle_rad) {}

    double angle_rad() const noexcept { return angle_rad_; }

private:
    double angle_rad_;
};

// Terrain reaches the display plane, or a scene description is inconsistent.
class SceneInvalid : public Error {
public:
    using Error::Error;
};

// Malformed or incomplete configuration; field() names the offending key path.
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace gridwarp
