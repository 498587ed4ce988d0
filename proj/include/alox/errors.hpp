#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace alox {

// Argument outside the mathematical domain of an operation.
class domain_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class parse_error : public std::runtime_error {
public:
    parse_error(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Invalid user configuration (cutoffs, paths, parameter bounds).
class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Non-convergence, singular solves and other numerical failures.
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class fit_error : public numerical_error {
public:
    using numerical_error::numerical_error;
};

class calibration_error : public numerical_error {
public:
    calibration_error(const std::string& what, double t_lower, double t_upper)
        : numerical_error(what), t_lower_(t_lower), t_upper_(t_upper) {}
    double t_at_lower() const noexcept { return t_lower_; }
    double t_at_upper() const noexcept { return t_upper_; }

private:
    double t_lower_;
    double t_upper_;
};

} // namespace alox
