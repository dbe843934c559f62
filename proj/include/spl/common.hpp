#pragma once

#include <stdexcept>
#include <string>

namespace spl {

// Shared numeric tolerances (relative where applicable).
inline constexpr double kTolSvd = 1e-9;
inline constexpr double kTolOrth = 1e-9;
inline constexpr double kTolProjector = 1e-8;

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Invalid SpectrumSpec; message names the offending field.
struct SpecError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NumericalError : std::runtime_error {
    NumericalError(const std::string& what, long iterations = -1)
        : std::runtime_error(what), iterations(iterations) {}
    long iterations;
};

struct ConstructionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace spl
