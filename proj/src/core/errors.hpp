#pragma once

#include <stdexcept>
#include <string>

namespace ordexp {

/// A statistic is degenerate (e.g. a residual sum of zero), so the
/// requested estimator is undefined for this input.
class DegenerateStatisticError : public std::domain_error {
public:
    explicit DegenerateStatisticError(const std::string& what)
        : std::domain_error(what) {}
};

/// Estimator family does not apply to the given statistics or scenario.
class IncompatibleEstimatorError : public std::invalid_argument {
public:
    explicit IncompatibleEstimatorError(const std::string& what)
        : std::invalid_argument(what) {}
};

/// Configuration document is malformed or violates an invariant.
class ConfigParseError : public std::runtime_error {
public:
    explicit ConfigParseError(const std::string& what)
        : std::runtime_error(what) {}
};

/// Filesystem failure, message carries the offending path.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ordexp
