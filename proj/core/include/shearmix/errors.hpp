#pragma once

#include <stdexcept>
#include <string>

namespace shearmix {

/// Invalid user input (bad coefficients, out-of-range parameters).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A call violated a documented precondition on its arguments.
class PreconditionError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Two independent evaluation routes disagreed, or a root search broke down.
class NumericalIntegrityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace shearmix
