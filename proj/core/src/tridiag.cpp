#include "fdc/tridiag.hpp"

namespace fdc {

TridiagonalSystem::TridiagonalSystem(std::vector<double> sub, std::vector<double> diag,
                                     std::vector<double> super)
    : sub_(std::move(sub)), diag_(std::move(diag)), super_(std::move(super)) {
    if (diag_.empty() || sub_.size() + 1 != diag_.size() || super_.size() + 1 != diag_.size())
        throw contract_error("TridiagonalSystem: inconsistent band lengths");
}

std::vector<double> TridiagonalSystem::solve(std::span<const double> rhs) const {
    const std::size_t n = diag_.size();
    if (rhs.size() != n) throw contract_error("TridiagonalSystem::solve: rhs length mismatch");

    std::vector<double> c(n - 1), x(n);
    double pivot = diag_[0];
    x[0] = rhs[0] / pivot;
    for (std::size_t i = 1; i < n; ++i) {
        c[i - 1] = super_[i - 1] / pivot;
        pivot = diag_[i] - sub_[i - 1] * c[i - 1];
        x[i] = (rhs[i] - sub_[i - 1] * x[i - 1]) / pivot;
    }
    for (std::size_t i = n - 1; i-- > 0;) x[i] -= c[i] * x[i + 1];
    return x;
}

TridiagonalSystem implicit_heat_matrix(double h, double dt, std::span<const double> a_slice) {
    const std::size_t n = a_slice.size();
    const double inv_h2 = 1.0 / (h * h);
    std::vector<double> sub(n - 1, -inv_h2), diag(n), super(n - 1, -inv_h2);
    for (std::size_t i = 0; i < n; ++i) diag[i] = 1.0 / dt + 2.0 * inv_h2 + a_slice[i];
    return TridiagonalSystem(std::move(sub), std::move(diag), std::move(super));
}

} // namespace fdc
