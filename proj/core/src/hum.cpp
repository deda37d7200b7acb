#include "fdc/hum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fdc {

namespace {

double dot_h(double h, const std::vector<double>& u, const std::vector<double>& v) {
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) acc += u[i] * v[i];
    return h * acc;
}

SpaceField interior_field(const SpaceMesh& m, std::vector<double> vals) {
    return SpaceField(m, SpacePlacement::PrimalInterior, std::move(vals));
}

/// Control candidate 1_omega q from an adjoint trajectory: dual instants
/// t_{1/2}..t_{M-1/2}, masked to omega.
GridFunction observed_control(const GridFunction& q, const Interval& omega) {
    const SpaceMesh& mesh = q.mesh();
    GridFunction v(mesh, q.grid(), SpacePlacement::PrimalInterior, TimePlacement::Dual);
    for (int n = 0; n < v.time_size(); ++n)
        for (int i = 0; i < v.space_size(); ++i)
            v.at(n, i) = omega.contains(mesh.primal(i + 1)) ? q.at(n, i) : 0.0;
    return v;
}

} // namespace

void ControlProblem::validate() const {
    if (!(omega.a < omega.b) || omega.a < 0.0 || omega.b > mesh.length)
        throw contract_error("ControlProblem: omega must be a nonempty interval inside (0,L)");
    bool any_point = false;
    for (int i = 1; i <= mesh.interior; ++i) any_point |= omega.contains(mesh.primal(i));
    if (!any_point) throw contract_error("ControlProblem: omega contains no mesh point");
    if (g.placement != SpacePlacement::PrimalInterior || !(g.mesh == mesh))
        throw contract_error("ControlProblem: initial data must be primal_interior on the problem mesh");
    if (theta_exp < 1 || theta_exp > 4) throw contract_error("ControlProblem: theta_exp must be in [1,4]");
    (void)phi_h(); // positivity check
}

ParameterLedger calibrate(const ControlProblem& p) {
    const double a_norm = p.f.empty() ? p.a.norm_inf() : p.f.lipschitz;
    CalibrationConfig cfg = p.weights;
    cfg.theta_exp = p.theta_exp;
    return calibrate(p.grid.horizon, p.mesh.h, p.grid.dt, a_norm, cfg);
}

CgResult conjugate_gradient(const std::function<std::vector<double>(const std::vector<double>&)>& apply,
                            const std::vector<double>& b, double h_weight, double tol_rel, int max_iter) {
    const std::size_t n = b.size();
    CgResult res;
    res.x.assign(n, 0.0);

    const double norm_b = std::sqrt(dot_h(h_weight, b, b));
    if (norm_b == 0.0) {
        res.converged = true;
        return res;
    }

    std::vector<double> r = b;              // r = b - A*0
    std::vector<double> p = r;
    double rr = dot_h(h_weight, r, r);
    res.residual_history.push_back(std::sqrt(rr) / norm_b);

    for (int it = 0; it < max_iter; ++it) {
        if (std::sqrt(rr) / norm_b <= tol_rel) {
            res.converged = true;
            break;
        }
        const std::vector<double> Ap = apply(p);
        const double pAp = dot_h(h_weight, p, Ap);
        if (!(pAp > 0.0))
            throw convergence_error("conjugate_gradient: operator lost positivity", res.residual_history);
        const double alpha = rr / pAp;
        for (std::size_t i = 0; i < n; ++i) {
            res.x[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
        }
        const double rr_new = dot_h(h_weight, r, r);
        const double beta = rr_new / rr;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
        rr = rr_new;
        res.iterations = it + 1;
        res.residual_history.push_back(std::sqrt(rr) / norm_b);
    }
    res.relative_residual = std::sqrt(rr) / norm_b;
    if (res.relative_residual <= tol_rel) res.converged = true;
    if (!res.converged)
        throw convergence_error("conjugate_gradient: no convergence within " + std::to_string(max_iter) +
                                " iterations (residual " + std::to_string(res.relative_residual) + ")",
                                res.residual_history);
    return res;
}

namespace {

std::vector<double> gramian_apply_with(const ControlProblem& p, const PotentialField& a,
                                       const std::vector<double>& q_T, double phi) {
    const GridFunction q = solve_adjoint(interior_field(p.mesh, q_T), a);
    const GridFunction v = observed_control(q, p.omega);
    const SpaceField zero(p.mesh, SpacePlacement::PrimalInterior);
    const GridFunction y = solve_forward(zero, a, v, p.omega);
    const auto yM = y.slice(p.grid.steps);
    std::vector<double> out(q_T.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = yM[i] + phi * q_T[i];
    return out;
}

HUMSolution solve_hum_with(const ControlProblem& p, const PotentialField& a, const ParameterLedger& ledger) {
    const int N = p.mesh.interior;
    const int M = p.grid.steps;
    const double phi = p.phi_h();

    HUMSolution sol;
    sol.phi_h = phi;
    sol.ledger = ledger;
    sol.norm_g = norm_L2(p.g);
    if (phi < 1e-12)
        sol.warnings.push_back("phi(h) < 1e-12: the shifted Gramian is near-singular");

    // Transpose-of-observation identity: the linear functional
    // q_T -> -(g, q^{1/2}) is represented by -y_free^M.
    const GridFunction y_free = solve_forward(p.g, a);
    std::vector<double> b(static_cast<std::size_t>(N));
    {
        const auto yM = y_free.slice(M);
        for (int i = 0; i < N; ++i) b[static_cast<std::size_t>(i)] = -yM[static_cast<std::size_t>(i)];
    }

    const int max_iter = (p.cg_max_iter > 0) ? p.cg_max_iter : 5 * N;
    const auto cg = conjugate_gradient(
        [&](const std::vector<double>& x) { return gramian_apply_with(p, a, x, phi); }, b,
        p.mesh.h, p.cg_tol, max_iter);

    sol.q_hat_T = cg.x;
    sol.cg_iterations = cg.iterations;
    sol.cg_residual = cg.relative_residual;

    const GridFunction q_hat = solve_adjoint(interior_field(p.mesh, sol.q_hat_T), a);
    sol.v = observed_control(q_hat, p.omega);
    sol.y = solve_forward(p.g, a, sol.v, p.omega);

    sol.norm_v = norm_L2_Q_restricted(sol.v, p.omega);
    sol.norm_yM = norm_L2(sol.y.slice_field(M));
    sol.norm_q_hat_T = norm_L2(interior_field(p.mesh, sol.q_hat_T));

    // J(q_hat_T) = 1/2 |1_omega q|^2_Q + phi/2 |q_T|^2 + (g, q^{1/2});
    // J(0) = 0, so the minimum is nonpositive.
    const double obs_energy = sol.norm_v * sol.norm_v;
    const double pairing = dot_h(p.mesh.h, p.g.v, std::vector<double>(q_hat.slice(0).begin(), q_hat.slice(0).end()));
    sol.functional_value = 0.5 * obs_energy + 0.5 * phi * sol.norm_q_hat_T * sol.norm_q_hat_T + pairing;
    return sol;
}

} // namespace

std::vector<double> gramian_apply(const ControlProblem& p, const std::vector<double>& q_T) {
    if (static_cast<int>(q_T.size()) != p.mesh.interior)
        throw contract_error("gramian_apply: q_T length mismatch");
    return gramian_apply_with(p, p.a.empty() ? PotentialField::zero(p.mesh, p.grid) : p.a, q_T, p.phi_h());
}

HUMSolution solve_hum(const ControlProblem& p) {
    p.validate();
    const PotentialField a = p.a.empty() ? PotentialField::zero(p.mesh, p.grid) : p.a;
    const ParameterLedger ledger = calibrate(p);
    return solve_hum_with(p, a, ledger);
}

HUMSolution solve_hum_long_horizon(const ControlProblem& p, double T0) {
    p.validate();
    if (p.grid.horizon < 1.0)
        throw contract_error("solve_hum_long_horizon: T < 1 is handled by solve_hum");
    if (!(T0 > 0.0) || T0 >= 1.0)
        throw contract_error("solve_hum_long_horizon: T0 must lie in (0,1)");

    const PotentialField a = p.a.empty() ? PotentialField::zero(p.mesh, p.grid) : p.a;
    const int M = p.grid.steps;
    const int M0 = std::max(1, static_cast<int>(std::floor(T0 / p.grid.dt)));
    if (M0 >= M) throw contract_error("solve_hum_long_horizon: T0 leaves no free phase");

    // Phase 1: penalized control on [0, M0 dt].
    ControlProblem p1 = p;
    p1.grid = TimeGrid::uniform(static_cast<double>(M0) * p.grid.dt, M0);
    {
        std::vector<double> vals;
        vals.reserve(static_cast<std::size_t>(p.mesh.interior) * static_cast<std::size_t>(M0));
        for (int n = 1; n <= M0; ++n) {
            const auto s = a.slice(n);
            vals.insert(vals.end(), s.begin(), s.end());
        }
        p1.a = PotentialField(p.mesh, p1.grid, std::move(vals));
    }
    HUMSolution phase1 = solve_hum(p1);

    // Phase 2: free evolution with the tail of the potential.
    HUMSolution sol;
    sol.phi_h = phase1.phi_h;
    sol.ledger = phase1.ledger;
    sol.warnings = phase1.warnings;
    sol.q_hat_T = phase1.q_hat_T;
    sol.cg_iterations = phase1.cg_iterations;
    sol.cg_residual = phase1.cg_residual;
    sol.norm_g = phase1.norm_g;
    sol.functional_value = phase1.functional_value;
    sol.phase_split = M0;
    sol.norm_y_phase1 = phase1.norm_yM;

    sol.v = GridFunction(p.mesh, p.grid, SpacePlacement::PrimalInterior, TimePlacement::Dual);
    sol.y = GridFunction(p.mesh, p.grid, SpacePlacement::PrimalInterior, TimePlacement::PrimalClosed);
    for (int n = 0; n <= M0; ++n) sol.y.set_slice(n, phase1.y.slice(n));
    for (int n = 0; n < M0; ++n) sol.v.set_slice(n, phase1.v.slice(n));

    std::vector<double> rhs(static_cast<std::size_t>(p.mesh.interior));
    const double inv_dt = 1.0 / p.grid.dt;
    for (int n = M0; n < M; ++n) {
        const auto prev = sol.y.slice(n);
        for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = prev[i] * inv_dt;
        const auto A = implicit_heat_matrix(p.mesh.h, p.grid.dt, a.slice(n + 1));
        sol.y.set_slice(n + 1, A.solve(rhs));
    }

    sol.norm_v = norm_L2_Q_restricted(sol.v, p.omega);
    sol.norm_yM = norm_L2(sol.y.slice_field(M));
    sol.norm_q_hat_T = phase1.norm_q_hat_T;

    const double contraction = 1.0 - 2.0 * p.grid.dt * a.norm_inf();
    sol.decay_factor = (contraction > 0.0) ? std::pow(contraction, -(M - M0)) : std::numeric_limits<double>::infinity();
    return sol;
}

HUMSolution solve_semilinear(const ControlProblem& p) {
    p.validate();
    if (p.f.empty()) throw contract_error("solve_semilinear: problem carries no nonlinearity");
    if (!(p.grid.dt * p.f.lipschitz < 0.25))
        throw infeasible_error("solve_semilinear: dt K < 1/4 violated");

    // Seed with the free linear flow, then iterate frozen-coefficient
    // controlled solves.
    GridFunction zeta = solve_forward(p.g, PotentialField::zero(p.mesh, p.grid));
    PotentialField a_k = frozen_potential(zeta, p.f);

    HUMSolution last;
    bool converged = false;
    int iterations = 0;
    std::vector<double> history;

    for (int k = 0; k < p.fp_max; ++k) {
        ControlProblem lin = p;
        lin.f = Nonlinearity::none();
        lin.a = a_k;
        // The frozen coefficient is bounded by the Lipschitz constant, so the
        // calibration budget of the nonlinear problem covers every iterate.
        last = solve_hum_with(lin, lin.a, calibrate(p));
        ++iterations;

        double diff = 0.0;
        double base = 0.0;
        {
            GridFunction delta = last.y;
            for (std::size_t j = 0; j < delta.raw().size(); ++j) delta.raw()[j] -= zeta.raw()[j];
            diff = norm_L2_Q(delta);
            base = norm_L2_Q(zeta);
        }
        history.push_back(diff / (1.0 + base));
        zeta = last.y;
        if (diff <= p.fp_tol * (1.0 + base)) {
            converged = true;
            break;
        }
        // A stationary frozen coefficient means the map is already at its
        // fixed point: the next sweep would reproduce this iterate exactly.
        const PotentialField a_next = frozen_potential(zeta, p.f);
        double a_diff = 0.0;
        for (int n = 1; n <= p.grid.steps; ++n) {
            const auto cur = a_next.slice(n);
            const auto prev = a_k.slice(n);
            for (std::size_t i = 0; i < cur.size(); ++i)
                a_diff = std::max(a_diff, std::abs(cur[i] - prev[i]));
        }
        a_k = a_next;
        if (a_diff <= 1e-14 * (1.0 + a_k.norm_inf())) {
            converged = true;
            break;
        }
    }

    last.picard_iterations = iterations;
    last.picard_converged = converged;
    last.picard_history = history;
    if (!converged)
        last.warnings.push_back("picard iteration did not reach fp_tol within fp_max iterations");
    return last;
}

} // namespace fdc
