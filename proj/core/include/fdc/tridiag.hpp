#pragma once

#include <span>
#include <vector>

#include "fdc/errors.hpp"

namespace fdc {

/// Tridiagonal system solved in place by the Thomas algorithm. No pivoting:
/// callers must guarantee strict diagonal dominance (the implicit-Euler
/// matrices satisfy it whenever dt |a| < 1).
class TridiagonalSystem {
public:
    TridiagonalSystem(std::vector<double> sub, std::vector<double> diag, std::vector<double> super);

    /// Solve A x = rhs, O(n).
    std::vector<double> solve(std::span<const double> rhs) const;

    int size() const { return static_cast<int>(diag_.size()); }
    double sub(int i) const { return sub_[static_cast<std::size_t>(i)]; }
    double diag(int i) const { return diag_[static_cast<std::size_t>(i)]; }
    double super(int i) const { return super_[static_cast<std::size_t>(i)]; }

private:
    std::vector<double> sub_;   // n-1
    std::vector<double> diag_;  // n
    std::vector<double> super_; // n-1
};

/// (I/dt - Delta_h + a I) restricted to the interior nodes, a given per node.
TridiagonalSystem implicit_heat_matrix(double h, double dt, std::span<const double> a_slice);

} // namespace fdc
