#pragma once

#include <stdexcept>
#include <string>

namespace capflow {

/// Evaluation requested outside the domain of definition (gridded fields,
/// trajectories leaving the grid box, kernel singularities).
class DomainError : public std::runtime_error {
  public:
    explicit DomainError(const std::string& what, double exit_time = 0.0)
        : std::runtime_error(what), exit_time_(exit_time) {}

    /// For flow-map exits: the integration time at which the trajectory left.
    double exit_time() const { return exit_time_; }

  private:
    double exit_time_;
};

/// Numeric failure (non-finite value) carrying the offending parameter.
class NumericError : public std::runtime_error {
  public:
    explicit NumericError(const std::string& what, double where = 0.0)
        : std::runtime_error(what), where_(where) {}
    double where() const { return where_; }

  private:
    double where_;
};

}  // namespace capflow
