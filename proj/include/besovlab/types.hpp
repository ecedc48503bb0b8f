#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace besovlab {

using Vec2 = Eigen::Vector2d;
using ArrayXXd = Eigen::ArrayXXd;

/// Rejected inputs: bad parameters, malformed specs, contract violations.
/// Maps to CLI exit code 2.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// Numerical failures: non-finite values, unattainable tolerances.
/// Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// File and serialization failures. Maps to CLI exit code 4.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace besovlab
