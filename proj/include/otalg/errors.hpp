#ifndef OTALG_ERRORS_HPP
#define OTALG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace otalg {

/// Invalid model parameters (non-monotone terrain steps, odd lambda, ...).
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Query outside the function's domain (e.g. barrier evaluation at r_z < 0).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& msg) : std::domain_error(msg) {}
};

/// Guidance requested at or past the terminal time (t_go below the guard).
class GuidanceHorizonError : public std::runtime_error {
public:
    explicit GuidanceHorizonError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Propagation drove the lander mass to zero or below.
class PropellantDepletedError : public std::runtime_error {
public:
    explicit PropellantDepletedError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Paired test on data with zero variance of the differences.
class DegenerateTestError : public std::runtime_error {
public:
    explicit DegenerateTestError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed or inconsistent run configuration.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace otalg

#endif
