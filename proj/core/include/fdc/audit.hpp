#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fdc/hum.hpp"
#include "fdc/mesh.hpp"
#include "fdc/rng.hpp"
#include "fdc/weights.hpp"

namespace fdc {

enum class AuditMode { Backward, Forward };
const char* to_string(AuditMode m);

/// Both sides of the weighted estimate, evaluated with the discrete
/// quadratures. Every sum would underflow as a raw double (the exponents
/// reach -1e3), so all recorded terms are scaled by exp(-log_scale) with
/// log_scale = max over the shifted instants and mesh points of
/// 2 tau theta(t) phi(x); the ratio is scale-invariant.
struct CarlemanReport {
    AuditMode mode = AuditMode::Backward;
    ParameterLedger ledger; // parameter snapshot
    double lambda = 0.0;
    double log_scale = 0.0;

    // weighted left-hand sums
    double lhs_time = 0.0;       // tau^-1 theta^-1 (|time difference|^2 + |Delta_h shifted|^2)
    double lhs_grad_dual = 0.0;  // tau theta |d_h shifted|^2 on the dual points
    double lhs_grad_avg = 0.0;   // tau theta |mbar d_h shifted|^2 on the primal points
    double lhs_zero_order = 0.0; // tau^3 theta^3 |shifted|^2

    // weighted right-hand sums (without the unknown constant)
    double rhs_source = 0.0;         // |parabolic operator applied to the field|^2
    double rhs_local = 0.0;          // tau^3 theta^3 |shifted|^2 over B
    double rhs_endpoint_first = 0.0; // h^-2 weighted first-slice energy
    double rhs_endpoint_last = 0.0;  // h^-2 weighted last-slice energy

    double lhs_total() const { return lhs_time + lhs_grad_dual + lhs_grad_avg + lhs_zero_order; }
    double rhs_total() const { return rhs_source + rhs_local + rhs_endpoint_first + rhs_endpoint_last; }

    /// Empty on the 0/0 case (identically zero field); serialized as the
    /// distinguished "undefined" value.
    std::optional<double> ratio() const {
        const double l = lhs_total();
        const double r = rhs_total();
        if (l == 0.0 && r == 0.0) return std::nullopt;
        return l / r;
    }
};

/// Evaluate both sides of the estimate for a fully-discrete field with zero
/// Dirichlet traces. Backward mode expects the field on the extended dual
/// instants (adjoint layout); forward mode on the closed primal instants.
/// Requires a feasible ledger; throws infeasible_error naming the violated
/// condition otherwise.
CarlemanReport carleman_sides(const GridFunction& q, const WeightSystem& w,
                              const ParameterLedger& ledger, const Interval& B, AuditMode mode);

struct ObservabilitySample {
    std::string kind; // "gaussian" or "eigenmode_k"
    double ratio = 0.0;
};

struct ObservabilityReport {
    std::vector<ObservabilitySample> samples;
    double max_ratio = 0.0;
    double median_ratio = 0.0;
    double reference_constant = 0.0; // exp(C1 (1 + 1/T + |a|^{2/3} + T |a|))
    double penalty = 0.0;            // phi(h) used in the denominators
    int n_samples = 0;
    ParameterLedger ledger; // grid and parameter snapshot
};

/// |q^{1/2}| over the observed energy plus the penalty term, for one terminal
/// datum; empty on q_T = 0 (the 0/0 case is excluded from the statistics).
std::optional<double> observability_ratio(const ControlProblem& p, const SpaceField& q_T);

/// Sample terminal data (low eigenmodes plus Gaussian fields), march the
/// adjoint system and record |q^{1/2}| over the observed energy plus the
/// penalty term. C1 scales the reference constant only.
ObservabilityReport estimate_observability(const ControlProblem& p, int n_samples, Rng& rng,
                                           double C1 = 1.0);

struct WeightOrderRow {
    std::string residual;  // which identity's residual is measured
    double h = 0.0;        // coarsest spacing
    double value_h = 0.0;
    double value_h2 = 0.0;
    double value_h4 = 0.0;
    double order_coarse = 0.0; // log2(value_h / value_h2)
    double order_fine = 0.0;   // log2(value_h2 / value_h4)
};

/// Convergence-order audit of the discrete weight-derivative identities at a
/// fixed interior instant: the half-shift difference against s lambda
/// phi_upper psi', the double average against 1, and the second difference
/// against the closed-form second derivative, over spacings h, h/2, h/4.
std::vector<WeightOrderRow> audit_weight_orders(const WeightSystem& w, double t, double x_probe,
                                                double h_coarse);

/// Residual of the gradient identity at the vertex x0, where the leading
/// term vanishes and the half-shift difference cancels by symmetry.
double weight_gradient_residual_at_vertex(const WeightSystem& w, double t, double h);

} // namespace fdc
