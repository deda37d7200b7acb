#include "fdc/calculus.hpp"

#include <cmath>

namespace fdc {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void require_placement(const SpaceField& u, SpacePlacement want, const char* op) {
    if (u.placement != want)
        throw contract_error(std::string(op) + ": expected " + to_string(want) + " placement, got " +
                             to_string(u.placement));
}

void require_placement(const TimeSeries& u, TimePlacement want, const char* op) {
    if (u.placement != want)
        throw contract_error(std::string(op) + ": expected " + to_string(want) + " placement, got " +
                             to_string(u.placement));
}

} // namespace

SpaceField diff_primal_to_dual(const SpaceField& u) {
    require_placement(u, SpacePlacement::PrimalWithBoundary, "diff_primal_to_dual");
    SpaceField out(u.mesh, SpacePlacement::Dual);
    const double inv_h = 1.0 / u.mesh.h;
    for (int i = 0; i < out.size(); ++i) out[i] = (u[i + 1] - u[i]) * inv_h;
    return out;
}

SpaceField diff_dual_to_primal(const SpaceField& u) {
    require_placement(u, SpacePlacement::Dual, "diff_dual_to_primal");
    SpaceField out(u.mesh, SpacePlacement::PrimalInterior);
    const double inv_h = 1.0 / u.mesh.h;
    for (int i = 0; i < out.size(); ++i) out[i] = (u[i + 1] - u[i]) * inv_h;
    return out;
}

SpaceField avg_primal_to_dual(const SpaceField& u) {
    require_placement(u, SpacePlacement::PrimalWithBoundary, "avg_primal_to_dual");
    SpaceField out(u.mesh, SpacePlacement::Dual);
    for (int i = 0; i < out.size(); ++i) out[i] = 0.5 * (u[i + 1] + u[i]);
    return out;
}

SpaceField avg_dual_to_primal(const SpaceField& u) {
    require_placement(u, SpacePlacement::Dual, "avg_dual_to_primal");
    SpaceField out(u.mesh, SpacePlacement::PrimalInterior);
    for (int i = 0; i < out.size(); ++i) out[i] = 0.5 * (u[i + 1] + u[i]);
    return out;
}

SpaceField laplacian(const SpaceField& u) {
    require_placement(u, SpacePlacement::PrimalWithBoundary, "laplacian");
    return diff_dual_to_primal(diff_primal_to_dual(u));
}

SpaceField with_boundary(const SpaceField& interior, double left, double right) {
    require_placement(interior, SpacePlacement::PrimalInterior, "with_boundary");
    SpaceField out(interior.mesh, SpacePlacement::PrimalWithBoundary);
    out[0] = left;
    for (int i = 0; i < interior.size(); ++i) out[i + 1] = interior[i];
    out[out.size() - 1] = right;
    return out;
}

SpaceField strip_boundary(const SpaceField& u) {
    require_placement(u, SpacePlacement::PrimalWithBoundary, "strip_boundary");
    SpaceField out(u.mesh, SpacePlacement::PrimalInterior);
    for (int i = 0; i < out.size(); ++i) out[i] = u[i + 1];
    return out;
}

SpaceField laplacian_dirichlet(const SpaceField& interior) {
    require_placement(interior, SpacePlacement::PrimalInterior, "laplacian_dirichlet");
    const int n = interior.size();
    SpaceField out(interior.mesh, SpacePlacement::PrimalInterior);
    const double inv_h2 = 1.0 / (interior.mesh.h * interior.mesh.h);
    for (int i = 0; i < n; ++i) {
        const double lo = (i > 0) ? interior[i - 1] : 0.0;
        const double hi = (i + 1 < n) ? interior[i + 1] : 0.0;
        out[i] = (lo - 2.0 * interior[i] + hi) * inv_h2;
    }
    return out;
}

SpaceField diff_dirichlet(const SpaceField& interior) {
    require_placement(interior, SpacePlacement::PrimalInterior, "diff_dirichlet");
    return diff_primal_to_dual(with_boundary(interior));
}

double laplacian_eigenvalue(const SpaceMesh& m, int k) {
    if (k < 1 || k > m.interior) throw contract_error("laplacian_eigenvalue: k out of [1,N]");
    const double s = std::sin(static_cast<double>(k) * kPi * m.h / (2.0 * m.length));
    return 4.0 / (m.h * m.h) * s * s;
}

SpaceField laplacian_eigenvector(const SpaceMesh& m, int k) {
    if (k < 1 || k > m.interior) throw contract_error("laplacian_eigenvector: k out of [1,N]");
    return SpaceField::sample(m, SpacePlacement::PrimalInterior,
                              [&](double x) { return std::sin(static_cast<double>(k) * kPi * x / m.length); });
}

TimeSeries time_diff_forward(const TimeSeries& u) {
    require_placement(u, TimePlacement::PrimalClosed, "time_diff_forward");
    TimeSeries out(u.grid, TimePlacement::Dual);
    const double inv_dt = 1.0 / u.grid.dt;
    for (int n = 0; n < out.size(); ++n) out[n] = (u[n + 1] - u[n]) * inv_dt;
    return out;
}

TimeSeries time_diff_backward(const TimeSeries& u) {
    require_placement(u, TimePlacement::DualExtended, "time_diff_backward");
    TimeSeries out(u.grid, TimePlacement::Primal);
    const double inv_dt = 1.0 / u.grid.dt;
    for (int n = 0; n < out.size(); ++n) out[n] = (u[n + 1] - u[n]) * inv_dt;
    return out;
}

TimeSeries shift_plus(const TimeSeries& u) {
    require_placement(u, TimePlacement::PrimalClosed, "shift_plus");
    TimeSeries out(u.grid, TimePlacement::Dual);
    for (int n = 0; n < out.size(); ++n) out[n] = u[n + 1];
    return out;
}

TimeSeries shift_minus(const TimeSeries& u) {
    require_placement(u, TimePlacement::PrimalClosed, "shift_minus");
    TimeSeries out(u.grid, TimePlacement::Dual);
    for (int n = 0; n < out.size(); ++n) out[n] = u[n];
    return out;
}

TimeSeries shift_bar_plus(const TimeSeries& u) {
    require_placement(u, TimePlacement::DualExtended, "shift_bar_plus");
    TimeSeries out(u.grid, TimePlacement::Primal);
    for (int n = 0; n < out.size(); ++n) out[n] = u[n + 1];
    return out;
}

TimeSeries shift_bar_minus(const TimeSeries& u) {
    if (u.placement != TimePlacement::DualExtended && u.placement != TimePlacement::Dual)
        throw contract_error("shift_bar_minus: expected a dual-grid series");
    TimeSeries out(u.grid, TimePlacement::Primal);
    for (int n = 0; n < out.size(); ++n) out[n] = u[n];
    return out;
}

namespace {

template <typename Map>
GridFunction columnwise(const GridFunction& u, TimePlacement src, TimePlacement dst, const char* op, Map step) {
    if (u.time_placement() != src)
        throw contract_error(std::string(op) + ": expected " + to_string(src) + " time placement, got " +
                             to_string(u.time_placement()));
    GridFunction out(u.mesh(), u.grid(), u.space_placement(), dst);
    const int nx = u.space_size();
    for (int n = 0; n < out.time_size(); ++n)
        for (int i = 0; i < nx; ++i) out.at(n, i) = step(u, n, i);
    return out;
}

} // namespace

GridFunction time_diff_backward(const GridFunction& u) {
    const double inv_dt = 1.0 / u.grid().dt;
    return columnwise(u, TimePlacement::DualExtended, TimePlacement::Primal, "time_diff_backward",
                      [inv_dt](const GridFunction& f, int n, int i) { return (f.at(n + 1, i) - f.at(n, i)) * inv_dt; });
}

GridFunction time_diff_forward(const GridFunction& u) {
    const double inv_dt = 1.0 / u.grid().dt;
    return columnwise(u, TimePlacement::PrimalClosed, TimePlacement::Dual, "time_diff_forward",
                      [inv_dt](const GridFunction& f, int n, int i) { return (f.at(n + 1, i) - f.at(n, i)) * inv_dt; });
}

GridFunction shift_bar_minus(const GridFunction& u) {
    return columnwise(u, TimePlacement::DualExtended, TimePlacement::Primal, "shift_bar_minus",
                      [](const GridFunction& f, int n, int i) { return f.at(n, i); });
}

GridFunction shift_bar_plus(const GridFunction& u) {
    return columnwise(u, TimePlacement::DualExtended, TimePlacement::Primal, "shift_bar_plus",
                      [](const GridFunction& f, int n, int i) { return f.at(n + 1, i); });
}

GridFunction shift_plus(const GridFunction& u) {
    return columnwise(u, TimePlacement::PrimalClosed, TimePlacement::Dual, "shift_plus",
                      [](const GridFunction& f, int n, int i) { return f.at(n + 1, i); });
}

} // namespace fdc
