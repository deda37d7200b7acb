#include "fdc/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

namespace fdc {

PotentialField::PotentialField(SpaceMesh m, TimeGrid g, std::vector<double> values)
    : mesh_(m), grid_(g), v_(std::move(values)) {
    const std::size_t want = static_cast<std::size_t>(m.interior) * static_cast<std::size_t>(g.steps);
    if (v_.size() != want) throw contract_error("PotentialField: value count mismatch");
    for (double x : v_) norm_inf_ = std::max(norm_inf_, std::abs(x));
}

PotentialField PotentialField::zero(SpaceMesh m, TimeGrid g) {
    return PotentialField(m, g, std::vector<double>(static_cast<std::size_t>(m.interior) *
                                                    static_cast<std::size_t>(g.steps), 0.0));
}

PotentialField PotentialField::constant(double c, SpaceMesh m, TimeGrid g) {
    return PotentialField(m, g, std::vector<double>(static_cast<std::size_t>(m.interior) *
                                                    static_cast<std::size_t>(g.steps), c));
}

PotentialField PotentialField::sample(SpaceMesh m, TimeGrid g,
                                      const std::function<double(double, double)>& a_tx) {
    std::vector<double> vals;
    vals.reserve(static_cast<std::size_t>(m.interior) * static_cast<std::size_t>(g.steps));
    for (int n = 1; n <= g.steps; ++n)
        for (int i = 1; i <= m.interior; ++i) vals.push_back(a_tx(g.primal(n), m.primal(i)));
    return PotentialField(m, g, std::move(vals));
}

double Nonlinearity::frozen_coefficient(double s) const {
    if (s == 0.0) return fprime0;
    const double val = f(s) / s;
    if (!std::isfinite(val)) throw contract_error("Nonlinearity: non-finite evaluation at s = " + std::to_string(s));
    return val;
}

Nonlinearity Nonlinearity::sine() {
    Nonlinearity n;
    n.f = [](double s) { return std::sin(s); };
    n.fprime0 = 1.0;
    n.lipschitz = 1.0;
    n.name = "sin";
    return n;
}

Nonlinearity Nonlinearity::table(std::vector<double> xs, std::vector<double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw contract_error("Nonlinearity::table: need matching lists of at least two samples");
    for (std::size_t k = 1; k < xs.size(); ++k)
        if (!(xs[k] > xs[k - 1])) throw contract_error("Nonlinearity::table: abscissae must increase");
    double lip = 0.0;
    bool crosses_zero = false;
    for (std::size_t k = 1; k < xs.size(); ++k) {
        lip = std::max(lip, std::abs((ys[k] - ys[k - 1]) / (xs[k] - xs[k - 1])));
        if (xs[k - 1] <= 0.0 && xs[k] >= 0.0) crosses_zero = true;
    }
    if (!crosses_zero) throw contract_error("Nonlinearity::table: samples must bracket s = 0");

    Nonlinearity n;
    auto xs_sh = std::make_shared<std::vector<double>>(std::move(xs));
    auto ys_sh = std::make_shared<std::vector<double>>(std::move(ys));
    n.f = [xs_sh, ys_sh](double s) {
        const auto& x = *xs_sh;
        const auto& y = *ys_sh;
        if (s <= x.front()) return y.front() + (s - x.front()) * (y[1] - y[0]) / (x[1] - x[0]);
        if (s >= x.back()) {
            const std::size_t m = x.size();
            return y.back() + (s - x.back()) * (y[m - 1] - y[m - 2]) / (x[m - 1] - x[m - 2]);
        }
        const auto it = std::upper_bound(x.begin(), x.end(), s);
        const std::size_t k = static_cast<std::size_t>(it - x.begin());
        const double w = (s - x[k - 1]) / (x[k] - x[k - 1]);
        return y[k - 1] + w * (y[k] - y[k - 1]);
    };
    // Enforce f(0) = 0 by construction check.
    if (std::abs(n.f(0.0)) > 1e-14)
        throw contract_error("Nonlinearity::table: interpolant must vanish at 0");
    n.fprime0 = 0.0;
    {
        // slope of the segment containing 0
        const auto& x = *xs_sh;
        const auto& y = *ys_sh;
        for (std::size_t k = 1; k < x.size(); ++k) {
            if (x[k - 1] <= 0.0 && 0.0 <= x[k]) {
                n.fprime0 = (y[k] - y[k - 1]) / (x[k] - x[k - 1]);
                break;
            }
        }
    }
    n.lipschitz = lip;
    n.name = "table";
    return n;
}

namespace {

void require_stability(const PotentialField& a, const char* op) {
    const double dt = a.grid().dt;
    if (!(dt * a.norm_inf() < 0.25)) {
        std::ostringstream os;
        os << op << ": stability condition dt |a| < 1/4 violated (dt |a| = " << dt * a.norm_inf() << ")";
        throw infeasible_error(os.str());
    }
}

void require_grids(const SpaceField& data, const PotentialField& a, const char* op) {
    if (!(data.mesh == a.mesh())) throw contract_error(std::string(op) + ": mesh mismatch");
    if (data.placement != SpacePlacement::PrimalInterior)
        throw contract_error(std::string(op) + ": data must be primal_interior");
}

} // namespace

GridFunction solve_forward(const SpaceField& g, const PotentialField& a) {
    return solve_forward(g, a, GridFunction(), Interval{0.0, 0.0});
}

GridFunction solve_forward(const SpaceField& g, const PotentialField& a, const GridFunction& v,
                           const Interval& omega) {
    require_grids(g, a, "solve_forward");
    require_stability(a, "solve_forward");
    const SpaceMesh& mesh = a.mesh();
    const TimeGrid& grid = a.grid();
    const int N = mesh.interior;
    const int M = grid.steps;
    const bool controlled = v.raw().size() > 0;
    if (controlled) {
        if (v.time_placement() != TimePlacement::Dual ||
            v.space_placement() != SpacePlacement::PrimalInterior || !(v.mesh() == mesh) ||
            !(v.grid() == grid))
            throw contract_error("solve_forward: control must be primal_interior x dual on the same grids");
    }

    std::vector<char> mask(static_cast<std::size_t>(N), 0);
    for (int i = 0; i < N; ++i) mask[static_cast<std::size_t>(i)] = omega.contains(mesh.primal(i + 1)) ? 1 : 0;

    GridFunction y(mesh, grid, SpacePlacement::PrimalInterior, TimePlacement::PrimalClosed);
    y.set_slice(0, std::span<const double>(g.v.data(), g.v.size()));

    std::vector<double> rhs(static_cast<std::size_t>(N));
    const double inv_dt = 1.0 / grid.dt;
    for (int n = 0; n < M; ++n) {
        const auto prev = y.slice(n);
        for (int i = 0; i < N; ++i) {
            double r = prev[static_cast<std::size_t>(i)] * inv_dt;
            if (controlled && mask[static_cast<std::size_t>(i)]) r += v.at(n, i);
            rhs[static_cast<std::size_t>(i)] = r;
        }
        const auto A = implicit_heat_matrix(mesh.h, grid.dt, a.slice(n + 1));
        y.set_slice(n + 1, A.solve(rhs));
    }
    return y;
}

GridFunction solve_adjoint(const SpaceField& q_T, const PotentialField& a) {
    require_grids(q_T, a, "solve_adjoint");
    require_stability(a, "solve_adjoint");
    const SpaceMesh& mesh = a.mesh();
    const TimeGrid& grid = a.grid();
    const int N = mesh.interior;
    const int M = grid.steps;

    GridFunction q(mesh, grid, SpacePlacement::PrimalInterior, TimePlacement::DualExtended);
    q.set_slice(M, std::span<const double>(q_T.v.data(), q_T.v.size()));

    std::vector<double> rhs(static_cast<std::size_t>(N));
    const double inv_dt = 1.0 / grid.dt;
    for (int n = M; n >= 1; --n) {
        const auto next = q.slice(n); // q^{n+1/2}
        for (int i = 0; i < N; ++i) rhs[static_cast<std::size_t>(i)] = next[static_cast<std::size_t>(i)] * inv_dt;
        const auto A = implicit_heat_matrix(mesh.h, grid.dt, a.slice(n));
        q.set_slice(n - 1, A.solve(rhs)); // q^{n-1/2}
    }
    return q;
}

std::vector<double> semilinear_step(const SpaceMesh& mesh, double dt, std::span<const double> y_prev,
                                    std::span<const double> v_slice, std::span<const double> zeta_slice,
                                    const Nonlinearity& f) {
    const std::size_t N = static_cast<std::size_t>(mesh.interior);
    if (y_prev.size() != N || zeta_slice.size() != N)
        throw contract_error("semilinear_step: slice length mismatch");
    if (!v_slice.empty() && v_slice.size() != N)
        throw contract_error("semilinear_step: control slice length mismatch");

    std::vector<double> a_slice(N, 0.0);
    if (!f.empty()) {
        for (std::size_t i = 0; i < N; ++i) {
            a_slice[i] = f.frozen_coefficient(zeta_slice[i]);
            if (!std::isfinite(a_slice[i]))
                throw contract_error("semilinear_step: non-finite frozen coefficient");
        }
    }
    std::vector<double> rhs(N);
    for (std::size_t i = 0; i < N; ++i)
        rhs[i] = y_prev[i] / dt + (v_slice.empty() ? 0.0 : v_slice[i]);
    const auto A = implicit_heat_matrix(mesh.h, dt, a_slice);
    return A.solve(rhs);
}

PotentialField frozen_potential(const GridFunction& zeta, const Nonlinearity& f) {
    if (zeta.space_placement() != SpacePlacement::PrimalInterior ||
        zeta.time_placement() != TimePlacement::PrimalClosed)
        throw contract_error("frozen_potential: iterate must be primal_interior x primal_closed");
    const SpaceMesh mesh = zeta.mesh();
    const TimeGrid grid = zeta.grid();
    std::vector<double> vals;
    vals.reserve(static_cast<std::size_t>(mesh.interior) * static_cast<std::size_t>(grid.steps));
    for (int n = 1; n <= grid.steps; ++n)
        for (int i = 0; i < mesh.interior; ++i)
            vals.push_back(f.empty() ? 0.0 : f.frozen_coefficient(zeta.at(n, i)));
    return PotentialField(mesh, grid, std::move(vals));
}

} // namespace fdc
