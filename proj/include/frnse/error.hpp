#pragma once

#include <stdexcept>
#include <string>

namespace frnse {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument (grid, kernel spec, parameters) was violated.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Two fields or trajectories live on different grids.
class GridMismatch : public InvalidArgument {
public:
    GridMismatch() : InvalidArgument("fields live on different grids") {}
};

/// A NaN or infinity appeared while integrating.
class DivergenceDetected : public Error {
public:
    using Error::Error;
};

/// Picard iteration hit its iteration cap with the increment above tolerance.
class NonConvergence : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace frnse
