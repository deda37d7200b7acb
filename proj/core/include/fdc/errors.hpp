#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fdc {

/// Misuse of an operation contract: wrong placement, wrong length, wrong grid.
struct contract_error : std::logic_error {
    using std::logic_error::logic_error;
};

/// A parameter set that violates a feasibility condition. The message names
/// the violated condition and carries the offending values.
struct infeasible_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Iterative solve that did not reach its tolerance. Carries the residual
/// history so the caller can inspect stagnation.
struct convergence_error : std::runtime_error {
    convergence_error(const std::string& what, std::vector<double> history)
        : std::runtime_error(what), residual_history(std::move(history)) {}
    std::vector<double> residual_history;
};

} // namespace fdc
