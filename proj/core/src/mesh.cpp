#include "fdc/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace fdc {

const char* to_string(SpacePlacement p) {
    switch (p) {
        case SpacePlacement::PrimalInterior: return "primal_interior";
        case SpacePlacement::PrimalWithBoundary: return "primal_with_boundary";
        case SpacePlacement::Dual: return "dual";
    }
    return "?";
}

const char* to_string(TimePlacement p) {
    switch (p) {
        case TimePlacement::Primal: return "primal";
        case TimePlacement::PrimalClosed: return "primal_closed";
        case TimePlacement::Dual: return "dual";
        case TimePlacement::DualExtended: return "dual_extended";
        case TimePlacement::SingleInstant: return "single_instant";
    }
    return "?";
}

int space_count(SpacePlacement p, const SpaceMesh& m) {
    switch (p) {
        case SpacePlacement::PrimalInterior: return m.interior;
        case SpacePlacement::PrimalWithBoundary: return m.interior + 2;
        case SpacePlacement::Dual: return m.interior + 1;
    }
    return 0;
}

int time_count(TimePlacement p, const TimeGrid& g) {
    switch (p) {
        case TimePlacement::Primal: return g.steps;
        case TimePlacement::PrimalClosed: return g.steps + 1;
        case TimePlacement::Dual: return g.steps;
        case TimePlacement::DualExtended: return g.steps + 1;
        case TimePlacement::SingleInstant: return 1;
    }
    return 0;
}

double space_coord(SpacePlacement p, const SpaceMesh& m, int k) {
    switch (p) {
        case SpacePlacement::PrimalInterior: return m.primal(k + 1);
        case SpacePlacement::PrimalWithBoundary: return m.primal(k);
        case SpacePlacement::Dual: return m.dual(k);
    }
    return 0.0;
}

double time_coord(TimePlacement p, const TimeGrid& g, int k) {
    switch (p) {
        case TimePlacement::Primal: return g.primal(k + 1);
        case TimePlacement::PrimalClosed: return g.primal(k);
        case TimePlacement::Dual: return g.dual(k);
        case TimePlacement::DualExtended: return g.dual(k);
        case TimePlacement::SingleInstant: return 0.0;
    }
    return 0.0;
}

SpaceField::SpaceField(SpaceMesh m, SpacePlacement p, std::vector<double> values)
    : mesh(m), placement(p), v(std::move(values)) {
    if (static_cast<int>(v.size()) != space_count(p, m))
        throw contract_error("SpaceField: value count does not match placement " +
                             std::string(to_string(p)));
}

SpaceField SpaceField::sample(SpaceMesh m, SpacePlacement p, const std::function<double(double)>& f) {
    SpaceField u(m, p);
    for (int k = 0; k < u.size(); ++k) u[k] = f(u.coord(k));
    return u;
}

TimeSeries::TimeSeries(TimeGrid g, TimePlacement p, std::vector<double> values)
    : grid(g), placement(p), v(std::move(values)) {
    if (static_cast<int>(v.size()) != time_count(p, g))
        throw contract_error("TimeSeries: value count does not match placement " +
                             std::string(to_string(p)));
}

TimeSeries TimeSeries::sample(TimeGrid g, TimePlacement p, const std::function<double(double)>& f) {
    TimeSeries u(g, p);
    for (int k = 0; k < u.size(); ++k) u[k] = f(u.coord(k));
    return u;
}

GridFunction GridFunction::sample(SpaceMesh m, TimeGrid g, SpacePlacement sp, TimePlacement tp,
                                  const std::function<double(double, double)>& f_tx) {
    GridFunction u(m, g, sp, tp);
    for (int n = 0; n < u.time_size(); ++n) {
        const double t = time_coord(tp, g, n);
        for (int i = 0; i < u.space_size(); ++i) u.at(n, i) = f_tx(t, space_coord(sp, m, i));
    }
    return u;
}

SpaceField GridFunction::slice_field(int t) const {
    SpaceField f(mesh_, sp_);
    const auto s = slice(t);
    std::copy(s.begin(), s.end(), f.v.begin());
    return f;
}

void GridFunction::set_slice(int t, std::span<const double> values) {
    if (static_cast<int>(values.size()) != space_size())
        throw contract_error("GridFunction::set_slice: slice length mismatch");
    std::copy(values.begin(), values.end(), v_.begin() + static_cast<std::ptrdiff_t>(idx(t, 0)));
}

namespace {

void require_integrable(const SpaceField& u, const char* op) {
    if (u.placement == SpacePlacement::PrimalWithBoundary)
        throw contract_error(std::string(op) + ": expected primal_interior or dual placement, got " +
                             to_string(u.placement));
}

void require_same(const SpaceField& u, const SpaceField& v, const char* op) {
    if (!(u.mesh == v.mesh) || u.placement != v.placement)
        throw contract_error(std::string(op) + ": placement or mesh mismatch (" +
                             to_string(u.placement) + " vs " + to_string(v.placement) + ")");
}

} // namespace

double integral_space(const SpaceField& u) {
    require_integrable(u, "integral_space");
    double acc = 0.0;
    for (double x : u.v) acc += x;
    return u.mesh.h * acc;
}

double integral_time(const TimeSeries& u) {
    double acc = 0.0;
    switch (u.placement) {
        case TimePlacement::Primal:
        case TimePlacement::Dual:
            for (double x : u.v) acc += x;
            break;
        case TimePlacement::PrimalClosed:
            for (int n = 1; n < u.size(); ++n) acc += u[n];
            break;
        case TimePlacement::DualExtended:
            for (int n = 0; n + 1 < u.size(); ++n) acc += u[n];
            break;
        case TimePlacement::SingleInstant:
            throw contract_error("integral_time: single-instant series has no time extent");
    }
    return u.grid.dt * acc;
}

double inner_product_L2(const SpaceField& u, const SpaceField& v) {
    require_integrable(u, "inner_product_L2");
    require_same(u, v, "inner_product_L2");
    double acc = 0.0;
    for (int k = 0; k < u.size(); ++k) acc += u[k] * v[k];
    return u.mesh.h * acc;
}

double norm_L2(const SpaceField& u) { return std::sqrt(inner_product_L2(u, u)); }

double norm_Linf(const SpaceField& u) {
    double m = 0.0;
    for (double x : u.v) m = std::max(m, std::abs(x));
    return m;
}

double norm_L2_restricted(const SpaceField& u, const Interval& omega) {
    require_integrable(u, "norm_L2_restricted");
    double acc = 0.0;
    for (int k = 0; k < u.size(); ++k)
        if (omega.contains(u.coord(k))) acc += u[k] * u[k];
    return std::sqrt(u.mesh.h * acc);
}

namespace {

// Instants carrying quadrature weight dt for the given time placement.
std::pair<int, int> time_sum_range(TimePlacement p, int stored) {
    switch (p) {
        case TimePlacement::Primal:
        case TimePlacement::Dual: return {0, stored};
        case TimePlacement::PrimalClosed: return {1, stored};
        case TimePlacement::DualExtended: return {0, stored - 1};
        case TimePlacement::SingleInstant: break;
    }
    throw contract_error("space-time integral: single-instant function has no time extent");
}

} // namespace

double inner_product_Q(const GridFunction& u, const GridFunction& v) {
    if (!(u.mesh() == v.mesh()) || !(u.grid() == v.grid()) ||
        u.space_placement() != v.space_placement() || u.time_placement() != v.time_placement())
        throw contract_error("inner_product_Q: placement or grid mismatch");
    if (u.space_placement() == SpacePlacement::PrimalWithBoundary)
        throw contract_error("inner_product_Q: expected primal_interior or dual placement");
    const auto [lo, hi] = time_sum_range(u.time_placement(), u.time_size());
    double acc = 0.0;
    for (int n = lo; n < hi; ++n) {
        double slice_acc = 0.0;
        const auto us = u.slice(n);
        const auto vs = v.slice(n);
        for (int i = 0; i < u.space_size(); ++i) slice_acc += us[static_cast<std::size_t>(i)] * vs[static_cast<std::size_t>(i)];
        acc += u.mesh().h * slice_acc;
    }
    return u.grid().dt * acc;
}

double norm_L2_Q(const GridFunction& u) { return std::sqrt(inner_product_Q(u, u)); }

double norm_L2_Q_restricted(const GridFunction& u, const Interval& omega) {
    if (u.space_placement() == SpacePlacement::PrimalWithBoundary)
        throw contract_error("norm_L2_Q_restricted: expected primal_interior or dual placement");
    const auto [lo, hi] = time_sum_range(u.time_placement(), u.time_size());
    double acc = 0.0;
    for (int n = lo; n < hi; ++n) {
        double slice_acc = 0.0;
        const auto us = u.slice(n);
        for (int i = 0; i < u.space_size(); ++i) {
            if (omega.contains(space_coord(u.space_placement(), u.mesh(), i)))
                slice_acc += us[static_cast<std::size_t>(i)] * us[static_cast<std::size_t>(i)];
        }
        acc += u.mesh().h * slice_acc;
    }
    return std::sqrt(u.grid().dt * acc);
}

double norm_Linf_Q(const GridFunction& u) {
    double m = 0.0;
    for (double x : u.raw()) m = std::max(m, std::abs(x));
    return m;
}

} // namespace fdc
