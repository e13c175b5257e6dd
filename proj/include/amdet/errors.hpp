#pragma once

#include <stdexcept>
#include <string>

namespace amdet {

// Base class for every numerical failure raised by the library. Callers that
// want to discard a bad Monte Carlo draw catch this and count it.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// A Gram matrix (or other rank probe) fell below the relative PD floor.
struct RankDeficient : NumericalError {
    explicit RankDeficient(const std::string& what) : NumericalError(what) {}
};

// A matrix required to be Hermitian positive definite is not.
struct NotPositiveDefinite : NumericalError {
    explicit NotPositiveDefinite(const std::string& what) : NumericalError(what) {}
};

// The secondary-data scatter matrix is singular (degenerate draw or too few columns).
struct SingularSecondary : NumericalError {
    explicit SingularSecondary(const std::string& what) : NumericalError(what) {}
};

// A block inverse inside a statistic failed the PD tolerance.
struct SingularBlock : NumericalError {
    explicit SingularBlock(const std::string& what) : NumericalError(what) {}
};

// Clutter one-lag correlation outside (-1, 1).
struct InvalidCorrelation : NumericalError {
    explicit InvalidCorrelation(const std::string& what) : NumericalError(what) {}
};

// A signal matrix that must be nonzero is identically zero.
struct ZeroSignal : NumericalError {
    explicit ZeroSignal(const std::string& what) : NumericalError(what) {}
};

// Monte Carlo discarded more trials than the configured budget allows.
struct TooManyDiscards : NumericalError {
    explicit TooManyDiscards(const std::string& what) : NumericalError(what) {}
};

// Configuration file/schema problems (CLI exit code 2).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace amdet
