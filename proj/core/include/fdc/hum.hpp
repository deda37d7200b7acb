#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fdc/mesh.hpp"
#include "fdc/solvers.hpp"
#include "fdc/weights.hpp"

namespace fdc {

/// Penalty weight phi(h). Default shape exp(-C2 / h^{1/theta_exp}); a custom
/// positive function may replace it.
struct PenaltySpec {
    double C2 = 0.05;
    std::function<double(double)> custom;

    double operator()(double h, int theta_exp) const {
        const double val = custom ? custom(h)
                                  : std::exp(-C2 / std::pow(h, 1.0 / static_cast<double>(theta_exp)));
        if (!(val > 0.0)) throw contract_error("PenaltySpec: phi(h) must be positive");
        return val;
    }
};

/// One penalized control instance: grids, observation window, potential (or
/// nonlinearity), initial data, penalty and solver knobs.
struct ControlProblem {
    SpaceMesh mesh;
    TimeGrid grid;
    Interval omega;
    PotentialField a;            // linear potential; zero() when semilinear
    Nonlinearity f;              // empty for the linear problem
    SpaceField g;                // initial data on the interior points
    int theta_exp = 4;
    PenaltySpec penalty;
    CalibrationConfig weights;
    double cg_tol = 1e-10;
    int cg_max_iter = 0;         // 0 -> 5 N
    double fp_tol = 1e-8;        // fixed-point stopping (semilinear)
    int fp_max = 50;

    void validate() const;
    double phi_h() const { return penalty(mesh.h, theta_exp); }
};

/// Calibrate the discrete parameters of a problem (tau, h1, delta, dt caps).
ParameterLedger calibrate(const ControlProblem& p);

struct HUMSolution {
    std::vector<double> q_hat_T;  // minimizer of the penalized functional
    GridFunction v;               // control, interior x dual instants, supported in omega
    GridFunction y;               // controlled trajectory, t_0..t_M
    double phi_h = 0.0;
    double norm_g = 0.0;
    double norm_v = 0.0;          // L2 over dual instants, restricted to omega
    double norm_yM = 0.0;
    double norm_q_hat_T = 0.0;
    double functional_value = 0.0; // J at the minimizer; J(0) = 0
    int cg_iterations = 0;
    double cg_residual = 0.0;      // relative to |b|
    ParameterLedger ledger;
    std::vector<std::string> warnings;

    // Long-horizon driver diagnostics (empty for the single-phase solve).
    std::optional<int> phase_split;      // M0
    std::optional<double> norm_y_phase1; // |y^{M0}|
    std::optional<double> decay_factor;  // bound factor for the free phase

    // Semilinear diagnostics.
    std::optional<int> picard_iterations;
    std::optional<bool> picard_converged;
    std::vector<double> picard_history;  // |zeta_{k+1} - zeta_k| / (1 + |zeta_k|)
};

struct CgResult {
    std::vector<double> x;
    int iterations = 0;
    double relative_residual = 0.0;
    std::vector<double> residual_history;
    bool converged = false;
};

/// Plain conjugate gradient in the h-weighted L2 inner product for an SPD
/// operator given matrix-free. Throws convergence_error (history attached)
/// when max_iter is exhausted.
CgResult conjugate_gradient(const std::function<std::vector<double>(const std::vector<double>&)>& apply,
                            const std::vector<double>& b, double h_weight, double tol_rel, int max_iter);

/// One application of the penalized control Gramian: Lambda(q_T) + phi(h) q_T
/// with Lambda realized matrix-free (adjoint solve, observe on omega, forward
/// solve from zero data, read the terminal slice).
std::vector<double> gramian_apply(const ControlProblem& p, const std::vector<double>& q_T);

/// Minimize the penalized functional by CG on its normal equation, build the
/// control v = 1_omega q_hat and the controlled trajectory. Requires a
/// calibratable parameter set (T < 1).
HUMSolution solve_hum(const ControlProblem& p);

/// Two-phase driver for T >= 1: control on [0, ~T0], then free decay.
HUMSolution solve_hum_long_horizon(const ControlProblem& p, double T0 = 0.5);

/// Picard iteration over frozen-coefficient linearizations of the semilinear
/// problem. Non-convergence is flagged on the result, never retried silently.
HUMSolution solve_semilinear(const ControlProblem& p);

} // namespace fdc
