#ifndef STRGEO_ERRORS_HPP
#define STRGEO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace strgeo {

// Argument outside the mathematical domain of an operation.
struct domain_error : std::domain_error {
    using std::domain_error::domain_error;
};

// State violates the validity predicate of its chart.
struct validity_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Point not in the overlap of source and target chart domains.
struct overlap_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operation requires a non-degenerate curve (discriminant != 0).
struct degenerate_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Evaluation too close to a lattice point of an elliptic function.
struct pole_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Requested branch does not match the located pole.
struct branch_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// No real momentum completion exists for the requested energy.
struct infeasible_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Step-size underflow, step budget exhausted, or similar integration failure.
// Carries the affine parameter reached when the failure occurred.
struct integration_error : std::runtime_error {
    explicit integration_error(const std::string& what, double s_reached_ = 0.0)
        : std::runtime_error(what), s_reached(s_reached_)
    {
    }
    double s_reached;
};

} // namespace strgeo

#endif
