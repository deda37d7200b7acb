#include "fdc/identities.hpp"

#include <algorithm>
#include <cmath>

namespace fdc {

namespace {

SpaceField mul(const SpaceField& a, const SpaceField& b) {
    if (a.placement != b.placement || !(a.mesh == b.mesh))
        throw contract_error("identity input mismatch");
    SpaceField out = a;
    for (int i = 0; i < out.size(); ++i) out[i] *= b[i];
    return out;
}

TimeSeries mul(const TimeSeries& a, const TimeSeries& b) {
    if (a.placement != b.placement || !(a.grid == b.grid))
        throw contract_error("identity input mismatch");
    TimeSeries out = a;
    for (int n = 0; n < out.size(); ++n) out[n] *= b[n];
    return out;
}

TimeSeries dual_part(const TimeSeries& u) {
    // Forget the exterior instant t_{M+1/2}.
    if (u.placement != TimePlacement::DualExtended)
        throw contract_error("dual_part: expected dual_extended");
    TimeSeries out(u.grid, TimePlacement::Dual);
    for (int n = 0; n < out.size(); ++n) out[n] = u[n];
    return out;
}

TimeSeries primal_part(const TimeSeries& u) {
    // Forget t_0.
    if (u.placement != TimePlacement::PrimalClosed)
        throw contract_error("primal_part: expected primal_closed");
    TimeSeries out(u.grid, TimePlacement::Primal);
    for (int n = 0; n < out.size(); ++n) out[n] = u[n + 1];
    return out;
}

SpaceField random_field(const SpaceMesh& m, SpacePlacement p, Rng& rng) {
    SpaceField f(m, p);
    for (int i = 0; i < f.size(); ++i) f[i] = rng.normal();
    return f;
}

TimeSeries random_series(const TimeGrid& g, TimePlacement p, Rng& rng) {
    TimeSeries u(g, p);
    for (int n = 0; n < u.size(); ++n) u[n] = rng.normal();
    return u;
}

} // namespace

std::vector<Identity> all_identities() {
    return {Identity::SpaceProductRule,        Identity::SpaceAverageProduct,
            Identity::SpaceDoubleAverage,      Identity::SpaceIntegrationByParts,
            Identity::SpaceShiftedAverage,     Identity::TimeProductRule,
            Identity::TimeSquareShiftPlus,     Identity::TimeSquareShiftMinus,
            Identity::TimeTransferPlus,        Identity::TimeTransferMinus,
            Identity::TimeIntegrationByParts,  Identity::TimePartsDualGrid,
            Identity::TimePartsPrimalGrid};
}

const char* to_string(Identity id) {
    switch (id) {
        case Identity::SpaceProductRule: return "space_product_rule";
        case Identity::SpaceAverageProduct: return "space_average_product";
        case Identity::SpaceDoubleAverage: return "space_double_average";
        case Identity::SpaceIntegrationByParts: return "space_integration_by_parts";
        case Identity::SpaceShiftedAverage: return "space_shifted_average";
        case Identity::TimeProductRule: return "time_product_rule";
        case Identity::TimeSquareShiftPlus: return "time_square_shift_plus";
        case Identity::TimeSquareShiftMinus: return "time_square_shift_minus";
        case Identity::TimeTransferPlus: return "time_transfer_plus";
        case Identity::TimeTransferMinus: return "time_transfer_minus";
        case Identity::TimeIntegrationByParts: return "time_integration_by_parts";
        case Identity::TimePartsDualGrid: return "time_parts_dual_grid";
        case Identity::TimePartsPrimalGrid: return "time_parts_primal_grid";
    }
    return "?";
}

std::optional<Identity> identity_from_string(const std::string& name) {
    for (Identity id : all_identities())
        if (name == to_string(id)) return id;
    return std::nullopt;
}

double rel_residual(double lhs, double rhs) {
    return std::abs(lhs - rhs) / (1.0 + std::abs(lhs));
}

double rel_residual(const std::vector<double>& lhs, const std::vector<double>& rhs) {
    if (lhs.size() != rhs.size()) throw contract_error("rel_residual: length mismatch");
    double num = 0.0;
    double mag = 0.0;
    for (std::size_t k = 0; k < lhs.size(); ++k) {
        num = std::max(num, std::abs(lhs[k] - rhs[k]));
        mag = std::max(mag, std::abs(lhs[k]));
    }
    return num / (1.0 + mag);
}

double residual_space_product_rule(const SpaceField& f1, const SpaceField& f2) {
    // Primal -> dual direction.
    const SpaceField lhs = diff_primal_to_dual(mul(f1, f2));
    SpaceField rhs = mul(diff_primal_to_dual(f1), avg_primal_to_dual(f2));
    const SpaceField cross = mul(avg_primal_to_dual(f1), diff_primal_to_dual(f2));
    for (int i = 0; i < rhs.size(); ++i) rhs[i] += cross[i];
    double res = rel_residual(lhs.v, rhs.v);

    // Dual -> primal direction, with the duals of the same inputs.
    const SpaceField g1 = avg_primal_to_dual(f1);
    const SpaceField g2 = diff_primal_to_dual(f2);
    const SpaceField lhs2 = diff_dual_to_primal(mul(g1, g2));
    SpaceField rhs2 = mul(diff_dual_to_primal(g1), avg_dual_to_primal(g2));
    const SpaceField cross2 = mul(avg_dual_to_primal(g1), diff_dual_to_primal(g2));
    for (int i = 0; i < rhs2.size(); ++i) rhs2[i] += cross2[i];
    return std::max(res, rel_residual(lhs2.v, rhs2.v));
}

double residual_space_average_product(const SpaceField& f1, const SpaceField& f2) {
    const double q = f1.mesh.h * f1.mesh.h / 4.0;
    const SpaceField lhs = avg_primal_to_dual(mul(f1, f2));
    SpaceField rhs = mul(avg_primal_to_dual(f1), avg_primal_to_dual(f2));
    const SpaceField cross = mul(diff_primal_to_dual(f1), diff_primal_to_dual(f2));
    for (int i = 0; i < rhs.size(); ++i) rhs[i] += q * cross[i];
    return rel_residual(lhs.v, rhs.v);
}

double residual_space_double_average(const SpaceField& f) {
    // mbar(m f) = f + (h^2/4) Lap f on the interior points.
    const double q = f.mesh.h * f.mesh.h / 4.0;
    const SpaceField lhs = avg_dual_to_primal(avg_primal_to_dual(f));
    SpaceField rhs = strip_boundary(f);
    const SpaceField lap = laplacian(f);
    for (int i = 0; i < rhs.size(); ++i) rhs[i] += q * lap[i];
    return rel_residual(lhs.v, rhs.v);
}

double residual_space_integration_by_parts(const SpaceField& f, const SpaceField& g) {
    if (g.placement != SpacePlacement::Dual)
        throw contract_error("space_integration_by_parts: g must be dual");
    const double lhs = inner_product_L2(strip_boundary(f), diff_dual_to_primal(g));
    const double rhs = -inner_product_L2(diff_primal_to_dual(f), g) +
                       f[f.size() - 1] * g[g.size() - 1] - f[0] * g[0];
    return rel_residual(lhs, rhs);
}

double residual_space_shifted_average(const SpaceField& f, const SpaceField& g) {
    if (g.placement != SpacePlacement::Dual)
        throw contract_error("space_shifted_average: g must be dual");
    const double half_h = 0.5 * f.mesh.h;
    const double lhs = inner_product_L2(strip_boundary(f), avg_dual_to_primal(g));
    const double rhs = inner_product_L2(avg_primal_to_dual(f), g) -
                       half_h * f[f.size() - 1] * g[g.size() - 1] - half_h * f[0] * g[0];
    return rel_residual(lhs, rhs);
}

double residual_time_product_rule(const TimeSeries& g1, const TimeSeries& g2) {
    const TimeSeries lhs = time_diff_backward(mul(g1, g2));

    TimeSeries rhs = mul(shift_bar_plus(g1), time_diff_backward(g2));
    const TimeSeries cross = mul(time_diff_backward(g1), shift_bar_minus(g2));
    for (int n = 0; n < rhs.size(); ++n) rhs[n] += cross[n];
    double res = rel_residual(lhs.v, rhs.v);

    TimeSeries rhs2 = mul(shift_bar_minus(g1), time_diff_backward(g2));
    const TimeSeries cross2 = mul(time_diff_backward(g1), shift_bar_plus(g2));
    for (int n = 0; n < rhs2.size(); ++n) rhs2[n] += cross2[n];
    return std::max(res, rel_residual(lhs.v, rhs2.v));
}

double residual_time_square_shift_plus(const TimeSeries& f) {
    const double half_dt = 0.5 * f.grid.dt;
    const TimeSeries df = time_diff_backward(f);
    const TimeSeries lhs = mul(shift_bar_plus(f), df);
    TimeSeries rhs = time_diff_backward(mul(f, f));
    for (int n = 0; n < rhs.size(); ++n) rhs[n] = 0.5 * rhs[n] + half_dt * df[n] * df[n];
    return rel_residual(lhs.v, rhs.v);
}

double residual_time_square_shift_minus(const TimeSeries& f) {
    const double half_dt = 0.5 * f.grid.dt;
    const TimeSeries df = time_diff_backward(f);
    const TimeSeries lhs = mul(shift_bar_minus(f), df);
    TimeSeries rhs = time_diff_backward(mul(f, f));
    for (int n = 0; n < rhs.size(); ++n) rhs[n] = 0.5 * rhs[n] - half_dt * df[n] * df[n];
    return rel_residual(lhs.v, rhs.v);
}

double residual_time_transfer_plus(const TimeSeries& u, const TimeSeries& v) {
    const double lhs = integral_time(mul(shift_plus(u), dual_part(v)));
    const double rhs = integral_time(mul(primal_part(u), shift_bar_minus(v)));
    return rel_residual(lhs, rhs);
}

double residual_time_transfer_minus(const TimeSeries& u, const TimeSeries& v) {
    const double dt = u.grid.dt;
    const double lhs = integral_time(mul(shift_minus(u), dual_part(v)));
    const double rhs = dt * u[0] * v[0] - dt * u[u.size() - 1] * v[v.size() - 1] +
                       integral_time(mul(primal_part(u), shift_bar_plus(v)));
    return rel_residual(lhs, rhs);
}

double residual_time_integration_by_parts(const TimeSeries& u, const TimeSeries& v) {
    const double lhs = integral_time(mul(time_diff_forward(u), dual_part(v)));
    const double rhs = -u[0] * v[0] + u[u.size() - 1] * v[v.size() - 1] -
                       integral_time(mul(time_diff_backward(v), primal_part(u)));
    return rel_residual(lhs, rhs);
}

double residual_time_parts_dual_grid(const TimeSeries& f, const TimeSeries& g) {
    const double lhs = integral_time(mul(time_diff_backward(f), shift_bar_minus(g)));
    const double rhs = -f[0] * g[0] + f[f.size() - 1] * g[g.size() - 1] -
                       integral_time(mul(shift_bar_plus(f), time_diff_backward(g)));
    return rel_residual(lhs, rhs);
}

double residual_time_parts_primal_grid(const TimeSeries& f, const TimeSeries& g) {
    const double lhs = integral_time(mul(time_diff_forward(f), shift_plus(g)));
    const double rhs = -f[0] * g[0] + f[f.size() - 1] * g[g.size() - 1] -
                       integral_time(mul(shift_minus(f), time_diff_forward(g)));
    return rel_residual(lhs, rhs);
}

double identity_trial(Identity id, const SpaceMesh& m, const TimeGrid& g, Rng& rng) {
    using SP = SpacePlacement;
    using TP = TimePlacement;
    switch (id) {
        case Identity::SpaceProductRule:
            return residual_space_product_rule(random_field(m, SP::PrimalWithBoundary, rng),
                                               random_field(m, SP::PrimalWithBoundary, rng));
        case Identity::SpaceAverageProduct:
            return residual_space_average_product(random_field(m, SP::PrimalWithBoundary, rng),
                                                  random_field(m, SP::PrimalWithBoundary, rng));
        case Identity::SpaceDoubleAverage:
            return residual_space_double_average(random_field(m, SP::PrimalWithBoundary, rng));
        case Identity::SpaceIntegrationByParts:
            return residual_space_integration_by_parts(random_field(m, SP::PrimalWithBoundary, rng),
                                                       random_field(m, SP::Dual, rng));
        case Identity::SpaceShiftedAverage:
            return residual_space_shifted_average(random_field(m, SP::PrimalWithBoundary, rng),
                                                  random_field(m, SP::Dual, rng));
        case Identity::TimeProductRule:
            return residual_time_product_rule(random_series(g, TP::DualExtended, rng),
                                              random_series(g, TP::DualExtended, rng));
        case Identity::TimeSquareShiftPlus:
            return residual_time_square_shift_plus(random_series(g, TP::DualExtended, rng));
        case Identity::TimeSquareShiftMinus:
            return residual_time_square_shift_minus(random_series(g, TP::DualExtended, rng));
        case Identity::TimeTransferPlus:
            return residual_time_transfer_plus(random_series(g, TP::PrimalClosed, rng),
                                               random_series(g, TP::DualExtended, rng));
        case Identity::TimeTransferMinus:
            return residual_time_transfer_minus(random_series(g, TP::PrimalClosed, rng),
                                                random_series(g, TP::DualExtended, rng));
        case Identity::TimeIntegrationByParts:
            return residual_time_integration_by_parts(random_series(g, TP::PrimalClosed, rng),
                                                      random_series(g, TP::DualExtended, rng));
        case Identity::TimePartsDualGrid:
            return residual_time_parts_dual_grid(random_series(g, TP::DualExtended, rng),
                                                 random_series(g, TP::DualExtended, rng));
        case Identity::TimePartsPrimalGrid:
            return residual_time_parts_primal_grid(random_series(g, TP::PrimalClosed, rng),
                                                   random_series(g, TP::PrimalClosed, rng));
    }
    throw contract_error("identity_trial: unknown identity");
}

bool IdentitySuiteResult::all_pass() const {
    return std::all_of(records.begin(), records.end(), [](const IdentityRecord& r) { return r.pass; });
}

IdentitySuiteResult run_identity_suite(const std::vector<int>& space_sizes,
                                       const std::vector<int>& time_sizes,
                                       int trials_per_grid, std::uint64_t seed,
                                       double tolerance, const std::string& inject_break) {
    IdentitySuiteResult result;
    result.tolerance = tolerance;
    Rng rng(seed);
    for (Identity id : all_identities()) {
        IdentityRecord rec;
        rec.id = id;
        for (int N : space_sizes) {
            for (int M : time_sizes) {
                const SpaceMesh m = SpaceMesh::uniform(1.0, N);
                const TimeGrid g = TimeGrid::uniform(1.0, M);
                for (int t = 0; t < trials_per_grid; ++t) {
                    rec.max_residual = std::max(rec.max_residual, identity_trial(id, m, g, rng));
                    ++rec.trials;
                }
            }
        }
        if (!inject_break.empty() && inject_break == to_string(id)) {
            // Negative-control hook: force a visible breach.
            rec.max_residual = std::max(rec.max_residual, 1e3 * tolerance);
        }
        rec.pass = rec.max_residual <= tolerance;
        result.records.push_back(rec);
    }
    return result;
}

} // namespace fdc
