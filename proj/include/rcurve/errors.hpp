#ifndef RCURVE_ERRORS_HPP
#define RCURVE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rcurve {

/// Bad inputs: dimension mismatches, invalid generators, malformed configs.
class validation_error : public std::invalid_argument {
public:
    explicit validation_error(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Runtime numerical failures: ODE blowup, positivity violation, simulation explosion.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace rcurve

#endif
