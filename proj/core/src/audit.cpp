#include "fdc/audit.hpp"

#include <algorithm>
#include <cmath>

#include "fdc/calculus.hpp"

namespace fdc {

const char* to_string(AuditMode m) { return m == AuditMode::Backward ? "backward" : "forward"; }

namespace {

void require_feasible(const ParameterLedger& led) {
    const double bound = led.config.eps0 * (1.0 + ParameterLedger::slack);
    if (led.cond_space_lhs > bound)
        throw infeasible_error("carleman_sides: tau h / (delta T^2) <= eps0 violated");
    if (led.cond_time_lhs > bound)
        throw infeasible_error("carleman_sides: tau^4 dt / (delta^4 T^6) <= eps0 violated");
}

struct ScaledWeights {
    double log_scale = 0.0;             // max over instants/points of 2 s(t) phi(x)
    std::vector<double> theta_q;        // theta at the M shifted instants
    std::vector<double> w2_primal;      // M x N   exp(2 s phi - log_scale) at x_i
    std::vector<double> w2_dual;        // M x (N+1) at x_{i+1/2}
    std::vector<double> w2_end_first;   // N, at the first endpoint instant
    std::vector<double> w2_end_last;    // N, at the last endpoint instant
};

ScaledWeights build_weights(const WeightSystem& w, AuditMode mode) {
    const SpaceMesh& mesh = w.mesh();
    const TimeGrid& grid = w.grid();
    const int N = mesh.interior;
    const int M = grid.steps;

    ScaledWeights sw;
    sw.theta_q.resize(static_cast<std::size_t>(M));
    for (int j = 0; j < M; ++j) sw.theta_q[static_cast<std::size_t>(j)] = w.theta(grid.dual(j));

    // phi is negative, so the largest exponent pairs the smallest theta with
    // the largest phi; both extremes are separable.
    double theta_min = sw.theta_q[0];
    for (double th : sw.theta_q) theta_min = std::min(theta_min, th);
    double phi_max = w.phi_lower(mesh.primal(1));
    for (int i = 1; i <= N; ++i) phi_max = std::max(phi_max, w.phi_lower(mesh.primal(i)));
    for (int i = 0; i <= N; ++i) phi_max = std::max(phi_max, w.phi_lower(mesh.dual(i)));
    sw.log_scale = 2.0 * w.tau() * theta_min * phi_max;

    sw.w2_primal.resize(static_cast<std::size_t>(M) * static_cast<std::size_t>(N));
    sw.w2_dual.resize(static_cast<std::size_t>(M) * static_cast<std::size_t>(N + 1));
    for (int j = 0; j < M; ++j) {
        const double s = w.tau() * sw.theta_q[static_cast<std::size_t>(j)];
        for (int i = 0; i < N; ++i)
            sw.w2_primal[static_cast<std::size_t>(j) * N + i] =
                std::exp(2.0 * s * w.phi_lower(mesh.primal(i + 1)) - sw.log_scale);
        for (int i = 0; i <= N; ++i)
            sw.w2_dual[static_cast<std::size_t>(j) * (N + 1) + i] =
                std::exp(2.0 * s * w.phi_lower(mesh.dual(i)) - sw.log_scale);
    }

    const double t_first = (mode == AuditMode::Backward) ? grid.dual(0) : grid.primal(0);
    const double t_last = (mode == AuditMode::Backward) ? grid.dual(M) : grid.primal(M);
    sw.w2_end_first.resize(static_cast<std::size_t>(N));
    sw.w2_end_last.resize(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) {
        sw.w2_end_first[static_cast<std::size_t>(i)] =
            std::exp(2.0 * w.s(t_first) * w.phi_lower(mesh.primal(i + 1)) - sw.log_scale);
        sw.w2_end_last[static_cast<std::size_t>(i)] =
            std::exp(2.0 * w.s(t_last) * w.phi_lower(mesh.primal(i + 1)) - sw.log_scale);
    }
    return sw;
}

} // namespace

CarlemanReport carleman_sides(const GridFunction& q, const WeightSystem& w,
                              const ParameterLedger& ledger, const Interval& B, AuditMode mode) {
    require_feasible(ledger);
    const SpaceMesh& mesh = q.mesh();
    const TimeGrid& grid = q.grid();
    if (!(mesh == w.mesh()) || !(grid == w.grid()))
        throw contract_error("carleman_sides: field and weight grids differ");
    if (q.space_placement() != SpacePlacement::PrimalInterior)
        throw contract_error("carleman_sides: field must be primal_interior in space");
    const TimePlacement want =
        (mode == AuditMode::Backward) ? TimePlacement::DualExtended : TimePlacement::PrimalClosed;
    if (q.time_placement() != want)
        throw contract_error(std::string("carleman_sides: ") + to_string(mode) + " mode expects " +
                             to_string(want) + " time placement");

    const int N = mesh.interior;
    const int M = grid.steps;
    const double h = mesh.h;
    const double dt = grid.dt;
    const double tau = w.tau();
    const double inv_dt = 1.0 / dt;

    const ScaledWeights sw = build_weights(w, mode);

    std::vector<char> in_B(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) in_B[static_cast<std::size_t>(i)] = B.contains(mesh.primal(i + 1)) ? 1 : 0;

    CarlemanReport rep;
    rep.mode = mode;
    rep.ledger = ledger;
    rep.lambda = w.lambda();
    rep.log_scale = sw.log_scale;

    for (int j = 0; j < M; ++j) {
        // Shifted slice entering the operator and the zero/gradient terms:
        // the earlier dual slice backward, the later primal slice forward.
        const int shifted_idx = (mode == AuditMode::Backward) ? j : j + 1;
        const SpaceField S = q.slice_field(shifted_idx);
        const auto lo = q.slice(j);
        const auto hi = q.slice(j + 1);

        const double theta_j = sw.theta_q[static_cast<std::size_t>(j)];
        const double* wp = &sw.w2_primal[static_cast<std::size_t>(j) * N];
        const double* wd = &sw.w2_dual[static_cast<std::size_t>(j) * (N + 1)];

        const SpaceField lap = laplacian_dirichlet(S);
        const SpaceField grad = diff_dirichlet(S);
        const SpaceField grad_avg = avg_dual_to_primal(grad);

        double time_acc = 0.0, zero_acc = 0.0, local_acc = 0.0, source_acc = 0.0, avg_acc = 0.0;
        for (int i = 0; i < N; ++i) {
            const double d = (hi[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)]) * inv_dt;
            const double Lq = (mode == AuditMode::Backward) ? (-d - lap[i]) : (d - lap[i]);
            const double wpi = wp[i];
            time_acc += wpi / theta_j * (d * d + lap[i] * lap[i]);
            zero_acc += wpi * theta_j * theta_j * theta_j * S[i] * S[i];
            avg_acc += wpi * theta_j * grad_avg[i] * grad_avg[i];
            source_acc += wpi * Lq * Lq;
            if (in_B[static_cast<std::size_t>(i)]) local_acc += wpi * theta_j * theta_j * theta_j * S[i] * S[i];
        }
        double grad_acc = 0.0;
        for (int i = 0; i <= N; ++i) grad_acc += wd[i] * theta_j * grad[i] * grad[i];

        rep.lhs_time += dt * h * time_acc / tau;
        rep.lhs_zero_order += dt * h * zero_acc * tau * tau * tau;
        rep.lhs_grad_avg += dt * h * avg_acc * tau;
        rep.lhs_grad_dual += dt * h * grad_acc * tau;
        rep.rhs_source += dt * h * source_acc;
        rep.rhs_local += dt * h * local_acc * tau * tau * tau;
    }

    const double inv_h2 = 1.0 / (h * h);
    const auto first = q.slice(0);
    const auto last = q.slice(M);
    double end_first = 0.0, end_last = 0.0;
    for (int i = 0; i < N; ++i) {
        end_first += sw.w2_end_first[static_cast<std::size_t>(i)] * first[static_cast<std::size_t>(i)] *
                     first[static_cast<std::size_t>(i)];
        end_last += sw.w2_end_last[static_cast<std::size_t>(i)] * last[static_cast<std::size_t>(i)] *
                    last[static_cast<std::size_t>(i)];
    }
    rep.rhs_endpoint_first = inv_h2 * h * end_first;
    rep.rhs_endpoint_last = inv_h2 * h * end_last;
    return rep;
}

std::optional<double> observability_ratio(const ControlProblem& p, const SpaceField& q_T) {
    const double q_T_norm = norm_L2(q_T);
    if (q_T_norm == 0.0) return std::nullopt; // 0/0, excluded from the statistics
    const PotentialField a = p.a.empty() ? PotentialField::zero(p.mesh, p.grid) : p.a;
    const GridFunction q = solve_adjoint(q_T, a);
    const double observed = norm_L2_Q_restricted(q, p.omega);
    const double first_slice = norm_L2(q.slice_field(0));
    const double penalty = p.phi_h();
    return first_slice / std::sqrt(observed * observed + penalty * q_T_norm * q_T_norm);
}

ObservabilityReport estimate_observability(const ControlProblem& p, int n_samples, Rng& rng, double C1) {
    p.validate();
    if (n_samples < 1) throw contract_error("estimate_observability: need at least one sample");
    const double a_norm = p.a.empty() ? 0.0 : p.a.norm_inf();

    ObservabilityReport rep;
    rep.ledger = calibrate(p);
    rep.penalty = p.phi_h();
    rep.n_samples = n_samples;
    rep.reference_constant =
        std::exp(C1 * (1.0 + 1.0 / p.grid.horizon + std::pow(a_norm, 2.0 / 3.0) + p.grid.horizon * a_norm));

    const int n_modes = std::min(5, p.mesh.interior);
    for (int s = 0; s < n_samples; ++s) {
        ObservabilitySample sample;
        SpaceField q_T(p.mesh, SpacePlacement::PrimalInterior);
        if (s < n_modes) {
            q_T = laplacian_eigenvector(p.mesh, s + 1);
            sample.kind = "eigenmode_" + std::to_string(s + 1);
        } else {
            for (int i = 0; i < q_T.size(); ++i) q_T[i] = rng.normal();
            sample.kind = "gaussian";
        }
        const auto ratio = observability_ratio(p, q_T);
        if (!ratio) continue;
        sample.ratio = *ratio;
        rep.samples.push_back(sample);
    }

    std::vector<double> ratios;
    ratios.reserve(rep.samples.size());
    for (const auto& s : rep.samples) ratios.push_back(s.ratio);
    std::sort(ratios.begin(), ratios.end());
    rep.max_ratio = ratios.empty() ? 0.0 : ratios.back();
    rep.median_ratio = ratios.empty() ? 0.0 : ratios[ratios.size() / 2];
    return rep;
}

namespace {

// Continuous half-shift operators applied to rho = exp(-s phi) at fixed t,
// multiplied by r = exp(s phi(x)). The exponents that survive are the small
// differences s (phi(x) - phi(x +- h/2)), safe without stabilization.
double r_halfshift_diff_rho(const WeightSystem& w, double s, double x, double h) {
    const double e_plus = std::exp(s * (w.phi_lower(x) - w.phi_lower(x + 0.5 * h)));
    const double e_minus = std::exp(s * (w.phi_lower(x) - w.phi_lower(x - 0.5 * h)));
    return (e_plus - e_minus) / h;
}

double r_double_average_rho(const WeightSystem& w, double s, double x, double h) {
    const double e_plus = std::exp(s * (w.phi_lower(x) - w.phi_lower(x + h)));
    const double e_zero = 1.0;
    const double e_minus = std::exp(s * (w.phi_lower(x) - w.phi_lower(x - h)));
    return 0.25 * (e_plus + 2.0 * e_zero + e_minus);
}

double r_second_diff_rho(const WeightSystem& w, double s, double x, double h) {
    const double e_plus = std::exp(s * (w.phi_lower(x) - w.phi_lower(x + h)));
    const double e_minus = std::exp(s * (w.phi_lower(x) - w.phi_lower(x - h)));
    return (e_plus - 2.0 + e_minus) / (h * h);
}

} // namespace

std::vector<WeightOrderRow> audit_weight_orders(const WeightSystem& w, double t, double x_probe,
                                                double h_coarse) {
    const double s = w.s(t);
    std::vector<WeightOrderRow> rows(3);
    rows[0].residual = "gradient_identity";
    rows[1].residual = "double_average";
    rows[2].residual = "second_derivative";

    const double grad_exact = -s * w.lambda() * w.phi_upper(x_probe) * w.psi_prime(x_probe);
    const double second_exact =
        s * s * w.phi_lower_prime(x_probe) * w.phi_lower_prime(x_probe) - s * w.phi_lower_second(x_probe);

    double vals[3][3];
    for (int k = 0; k < 3; ++k) {
        const double h = h_coarse / static_cast<double>(1 << k);
        vals[0][k] = std::abs(r_halfshift_diff_rho(w, s, x_probe, h) - grad_exact);
        vals[1][k] = std::abs(r_double_average_rho(w, s, x_probe, h) - 1.0);
        vals[2][k] = std::abs(r_second_diff_rho(w, s, x_probe, h) - second_exact);
    }
    for (int r = 0; r < 3; ++r) {
        rows[static_cast<std::size_t>(r)].h = h_coarse;
        rows[static_cast<std::size_t>(r)].value_h = vals[r][0];
        rows[static_cast<std::size_t>(r)].value_h2 = vals[r][1];
        rows[static_cast<std::size_t>(r)].value_h4 = vals[r][2];
        rows[static_cast<std::size_t>(r)].order_coarse = std::log2(vals[r][0] / vals[r][1]);
        rows[static_cast<std::size_t>(r)].order_fine = std::log2(vals[r][1] / vals[r][2]);
    }
    return rows;
}

double weight_gradient_residual_at_vertex(const WeightSystem& w, double t, double h) {
    const double s = w.s(t);
    // psi' vanishes at the vertex, so the identity reduces to the half-shift
    // difference itself.
    return std::abs(r_halfshift_diff_rho(w, s, w.x0(), h));
}

} // namespace fdc
