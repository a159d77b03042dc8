#pragma once

#include <stdexcept>
#include <string>

namespace dampedbar {

// Base of every error thrown by the library. The subclasses map one-to-one
// onto the failure categories callers need to distinguish (the CLI turns
// them into exit codes).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

// ln|R| diverges: one of the boundary coefficients is +-1.
class DegenerateSpectrum : public Error {
public:
    using Error::Error;
};

// The biorthogonal normalization L(1 - h1^2) vanishes.
class NormalizationSingular : public Error {
public:
    using Error::Error;
};

// Response assembly refuses special configuration classes.
class UnsupportedConfiguration : public Error {
public:
    using Error::Error;
};

// Adaptive quadrature ran out of panels before meeting its tolerance.
class AccuracyError : public Error {
public:
    AccuracyError(const std::string& what, double achieved)
        : Error(what + " (achieved estimate " + std::to_string(achieved) + ")"),
          achieved_(achieved) {}

    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

// Factorization or eigensolver failure.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace dampedbar
