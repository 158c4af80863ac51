#pragma once

#include <stdexcept>
#include <string>

namespace ptscat {

// Base class for all library errors.
struct error : std::runtime_error {
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Evaluation at (or within tolerance of) a pole of a Gamma factor or of an
// unnormalized Jost quantity.
struct pole_error : error {
    explicit pole_error(const std::string& what) : error(what) {}
};

// Argument outside the admissible domain of a series / representation
// (e.g. |zeta| too close to 1).
struct domain_error : error {
    explicit domain_error(const std::string& what) : error(what) {}
};

// Degenerate parameter configuration (logarithmic Kummer case, zero jump, ...).
struct degenerate_error : error {
    explicit degenerate_error(const std::string& what) : error(what) {}
};

// Iterative scheme failed to converge within its budget.
struct convergence_error : error {
    explicit convergence_error(const std::string& what) : error(what) {}
};

// Precondition violation detected at run time.
struct precondition_error : error {
    explicit precondition_error(const std::string& what) : error(what) {}
};

// No admissible regime for an asymptotic formula / reconstruction hypothesis.
struct regime_error : error {
    explicit regime_error(const std::string& what) : error(what) {}
};

// Resource budget exceeded (evaluation counts, subdivision depth, ...).
struct budget_error : error {
    explicit budget_error(const std::string& what) : error(what) {}
};

// Invalid run configuration (CLI layer).
struct config_error : error {
    explicit config_error(const std::string& what) : error(what) {}
};

} // namespace ptscat
