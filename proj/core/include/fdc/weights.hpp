#pragma once

#include <string>

#include "fdc/mesh.hpp"

namespace fdc {

/// Existential constants of the weight construction, exposed as knobs. The
/// defaults follow the reference configuration; feasible desk-scale runs
/// usually override eps0/tau2/delta1 (see configs/).
struct CalibrationConfig {
    double eps0 = 0.1;    // smallness threshold of both coupling conditions
    double tau2 = 2.0;    // tau = tau2 (T + T^2 + T^2 |a|^{2/3})
    double delta1 = 0.25; // ceiling for the singularity-shift delta, < 1/2
    double lambda = 2.0;  // exponent steering the weight steepness
    double h0 = 1.0;      // absolute mesh-size ceiling
    int theta_exp = 4;    // in [1,4]; trades dt ~ h^{4/theta_exp} vs decay rate
};

/// Outcome of the parameter coupling: the fixed tau, the mesh threshold h1,
/// the induced delta and dt ceiling, and the two coupling conditions with
/// their values so that any report is independently re-checkable.
struct ParameterLedger {
    // inputs
    double T = 0.0;
    double h = 0.0;
    double dt = 0.0;
    double a_norm = 0.0;
    CalibrationConfig config;

    // derived
    double tau = 0.0;
    double h1 = 0.0;       // mesh threshold; calibration requires h <= min(h0, h1)
    double delta = 0.0;    // (h/h1)^{1/theta_exp} * delta1
    double dt_max = 0.0;   // min{T^-2 h^{4/theta}, (4|a|)^-1}

    // condition values, to be compared against eps0
    double cond_space_lhs = 0.0; // tau h / (delta T^2)
    double cond_time_lhs = 0.0;  // tau^4 dt / (delta^4 T^6)

    // With theta_exp = 4 and dt at the cap the time condition holds with
    // equality in exact arithmetic; allow a few ulps.
    static constexpr double slack = 1e-9;

    bool feasible() const {
        const double bound = config.eps0 * (1.0 + slack);
        return cond_space_lhs <= bound && cond_time_lhs <= bound && delta <= config.delta1 &&
               dt <= delta * T / 2.0 * (1.0 + slack);
    }
};

/// The dt-independent half of the calibration: tau, the mesh threshold h1,
/// delta and the dt ceilings. Used to pick a time grid before one exists.
struct PreCalibration {
    double tau = 0.0;
    double h1 = 0.0;
    double delta = 0.0;
    double dt_coupling = 0.0;    // T^-2 h^{4/theta_exp}
    double dt_stability = 0.0;   // (4 |a|)^-1, +inf for a = 0
    double dt_theta_bound = 0.0; // delta T / 2, keeps max theta <= 2/(delta T^2)
    double dt_cap() const;       // min of the three
};

PreCalibration pre_calibrate(double T, double h, double a_norm, const CalibrationConfig& cfg);

/// Connect the discrete parameters: fix tau from (T, |a|), derive the mesh
/// threshold h1 and delta, and validate every coupling condition. Throws
/// infeasible_error naming the violated condition; T >= 1 is rejected with a
/// pointer to the two-phase long-horizon driver.
ParameterLedger calibrate(double T, double h, double dt, double a_norm, const CalibrationConfig& cfg);

/// The weight system: psi(x) = C_psi - (x - x0)^2 > 0, the negative spatial
/// weight phi_lower = e^{lambda psi} - e^{lambda K} < 0, its positive part
/// phi_upper = e^{lambda psi}, and the time factor
/// theta(t) = 1/((t + delta T)(T + delta T - t)). All evaluations are closed
/// form; products like e^{2 tau theta phi} are handled by callers in log
/// space via log_r.
class WeightSystem {
public:
    /// B is an open observation window strictly inside (0,L); B0 is its
    /// middle half, and x0 the midpoint of B0. C_psi = (1.1 L)^2 + 1 keeps
    /// psi positive on the 10%-enlarged neighborhood; K = C_psi + 1.
    WeightSystem(SpaceMesh mesh, TimeGrid grid, Interval B, double lambda, double tau, double delta);

    double psi(double x) const { return c_psi_ - (x - x0_) * (x - x0_); }
    double psi_prime(double x) const { return -2.0 * (x - x0_); }
    double phi_upper(double x) const;                 // e^{lambda psi}
    double phi_lower(double x) const;                 // e^{lambda psi} - e^{lambda K} < 0
    double phi_lower_prime(double x) const;           // lambda psi' e^{lambda psi}
    double phi_lower_second(double x) const;

    /// theta on its non-singular window (-delta T, T + delta T); outside ->
    /// std::domain_error.
    double theta(double t) const;
    double theta_prime(double t) const;               // (2t - T) theta^2

    double s(double t) const { return tau_ * theta(t); }
    /// log r(t,x) = s(t) phi_lower(x) <= 0; r and rho = 1/r are exp(+-log_r).
    double log_r(double t, double x) const { return s(t) * phi_lower(x); }

    double lambda() const { return lambda_; }
    double tau() const { return tau_; }
    double delta() const { return delta_; }
    double x0() const { return x0_; }
    double c_psi() const { return c_psi_; }
    double k_const() const { return k_; }
    Interval b0() const { return b0_; }
    Interval b() const { return b_; }
    const SpaceMesh& mesh() const { return mesh_; }
    const TimeGrid& grid() const { return grid_; }

private:
    SpaceMesh mesh_;
    TimeGrid grid_;
    Interval b_;
    Interval b0_;
    double lambda_;
    double tau_;
    double delta_;
    double x0_;
    double c_psi_;
    double k_;
};

/// Build the weight system for a calibrated ledger.
WeightSystem make_weight_system(const SpaceMesh& mesh, const TimeGrid& grid, Interval B,
                                const ParameterLedger& ledger);

} // namespace fdc
