#pragma once

#include <stdexcept>
#include <string>

namespace isoboltz {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Gamma argument on or within tolerance of a non-positive integer.
struct PoleError : Error {
    using Error::Error;
};
struct DomainError : Error {
    using Error::Error;
};
struct NoRootError : Error {
    using Error::Error;
};
struct FileFormatError : Error {
    using Error::Error;
};
struct CostError : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};
struct ConvergenceError : Error {
    using Error::Error;
};
struct BlowupError : Error {
    BlowupError(const std::string& what, double t) : Error(what), time(t) {}
    double time;
};

}  // namespace isoboltz
