#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace hpz {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

// Model/regime combination that the library does not support.
class UnsupportedError : public Error {
public:
    using Error::Error;
};

// A quantity that is infinite without a high-frequency cutoff.
class DivergenceError : public Error {
public:
    using Error::Error;
};

class QuadratureError : public Error {
public:
    QuadratureError(const std::string& what, double achieved)
        : Error(what + " (achieved error estimate " + format(achieved) + ")"),
          achieved_(achieved) {}
    double achieved() const noexcept { return achieved_; }

private:
    static std::string format(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3g", v);
        return buf;
    }
    double achieved_;
};

// Internal consistency check failed (indefinite covariance, mass loss, ...).
class ConsistencyError : public Error {
public:
    using Error::Error;
};

// Fit requested outside the window where its law holds.
class FitWindowError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// Explanation attached to zero-point divergences.
inline constexpr const char* kZeroPointDivergence =
    "zero-point fluctuations of the bath make <X^2(t)> logarithmically divergent for an "
    "initially uncoupled particle (long-time form (2 hbar/pi zeta) log(zeta t) - "
    "(hbar/pi zeta) log 0+); set a finite 'cutoff' or use the high-temperature regime";

}  // namespace hpz
