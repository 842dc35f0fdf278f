#pragma once

#include <stdexcept>
#include <string>

namespace ddlab {

struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& key, const std::string& what)
        : std::runtime_error("invalid value for '" + key + "': " + what), key(key) {}
    std::string key;
};

struct ParseError : std::runtime_error {
    ParseError(int line, int column, const std::string& what)
        : std::runtime_error("parse error at " + std::to_string(line) + ":" +
                             std::to_string(column) + ": " + what),
          line(line), column(column) {}
    int line;
    int column;
};

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Degenerate : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BracketInvalid : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BisectionUndetermined : std::runtime_error {
    explicit BisectionUndetermined(double mu, const std::string& what)
        : std::runtime_error("undetermined shot at mu=" + std::to_string(mu) + ": " + what),
          mu(mu) {}
    double mu;
};

struct NotCritical : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InsufficientSamples : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LengthMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SupportOverflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoConvergence : std::runtime_error {
    NoConvergence(std::size_t step_index, double residual)
        : std::runtime_error("nonlinear solve did not converge at step " +
                             std::to_string(step_index) +
                             " (last residual " + std::to_string(residual) + ")"),
          step_index(step_index), residual(residual) {}
    std::size_t step_index;
    double residual;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace ddlab
