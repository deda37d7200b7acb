#include "fdc/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fdc {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

} // namespace

double PreCalibration::dt_cap() const {
    return std::min(std::min(dt_coupling, dt_stability), dt_theta_bound);
}

PreCalibration pre_calibrate(double T, double h, double a_norm, const CalibrationConfig& cfg) {
    if (cfg.theta_exp < 1 || cfg.theta_exp > 4)
        throw infeasible_error("calibrate: theta_exp must lie in [1,4], got " + std::to_string(cfg.theta_exp));
    if (!(cfg.delta1 > 0.0) || !(cfg.delta1 < 0.5))
        throw infeasible_error("calibrate: delta1 must lie in (0, 1/2), got " + fmt(cfg.delta1));
    if (T >= 1.0)
        throw infeasible_error("calibrate: T >= 1 is outside the single-phase branch; "
                               "use the long-horizon (two-phase) driver");
    if (!(T > 0.0) || !(h > 0.0))
        throw infeasible_error("calibrate: T and h must be positive");
    if (a_norm < 0.0) throw infeasible_error("calibrate: negative potential norm");

    PreCalibration pre;
    const double a23 = std::pow(a_norm, 2.0 / 3.0);
    pre.tau = cfg.tau2 * (T + T * T + T * T * a23);
    pre.h1 = cfg.eps0 * std::pow(cfg.delta1 / cfg.tau2 / (1.0 + 1.0 / T + a23),
                                 static_cast<double>(cfg.theta_exp));

    if (h > cfg.h0)
        throw infeasible_error("calibrate: h <= h0 violated (h = " + fmt(h) + ", h0 = " + fmt(cfg.h0) + ")");
    if (h > pre.h1)
        throw infeasible_error("calibrate: h <= h1 violated (h = " + fmt(h) + ", h1 = " + fmt(pre.h1) +
                               "); refine the mesh or enlarge eps0/delta1/tau2^-1");

    pre.delta = std::pow(h / pre.h1, 1.0 / static_cast<double>(cfg.theta_exp)) * cfg.delta1;
    pre.dt_coupling = std::pow(h, 4.0 / static_cast<double>(cfg.theta_exp)) / (T * T);
    pre.dt_stability = (a_norm > 0.0) ? 1.0 / (4.0 * a_norm)
                                      : std::numeric_limits<double>::infinity();
    pre.dt_theta_bound = pre.delta * T / 2.0;
    return pre;
}

ParameterLedger calibrate(double T, double h, double dt, double a_norm, const CalibrationConfig& cfg) {
    if (!(dt > 0.0)) throw infeasible_error("calibrate: dt must be positive");
    const PreCalibration pre = pre_calibrate(T, h, a_norm, cfg);

    ParameterLedger led;
    led.T = T;
    led.h = h;
    led.dt = dt;
    led.a_norm = a_norm;
    led.config = cfg;
    led.tau = pre.tau;
    led.h1 = pre.h1;
    led.delta = pre.delta;
    led.dt_max = std::min(pre.dt_coupling, pre.dt_stability);

    if (dt > led.dt_max * (1.0 + ParameterLedger::slack))
        throw infeasible_error("calibrate: dt <= min{T^-2 h^{4/theta}, (4|a|)^-1} violated (dt = " +
                               fmt(dt) + ", cap = " + fmt(led.dt_max) + ")");
    if (dt > led.delta * T / 2.0 * (1.0 + ParameterLedger::slack))
        throw infeasible_error("calibrate: dt <= delta T / 2 violated (dt = " + fmt(dt) +
                               ", delta T / 2 = " + fmt(led.delta * T / 2.0) + ")");

    led.cond_space_lhs = led.tau * h / (led.delta * T * T);
    led.cond_time_lhs = std::pow(led.tau, 4.0) * dt / (std::pow(led.delta, 4.0) * std::pow(T, 6.0));

    if (led.cond_space_lhs > cfg.eps0 * (1.0 + ParameterLedger::slack))
        throw infeasible_error("calibrate: tau h / (delta T^2) <= eps0 violated (lhs = " +
                               fmt(led.cond_space_lhs) + ", eps0 = " + fmt(cfg.eps0) + ")");
    if (led.cond_time_lhs > cfg.eps0 * (1.0 + ParameterLedger::slack))
        throw infeasible_error("calibrate: tau^4 dt / (delta^4 T^6) <= eps0 violated (lhs = " +
                               fmt(led.cond_time_lhs) + ", eps0 = " + fmt(cfg.eps0) + ")");
    return led;
}

WeightSystem::WeightSystem(SpaceMesh mesh, TimeGrid grid, Interval B, double lambda, double tau, double delta)
    : mesh_(mesh), grid_(grid), b_(B), lambda_(lambda), tau_(tau), delta_(delta) {
    if (!(B.a < B.b) || B.a <= 0.0 || B.b >= mesh.length)
        throw contract_error("WeightSystem: B must be a nonempty open interval strictly inside (0,L)");
    if (!(lambda >= 1.0)) throw contract_error("WeightSystem: lambda >= 1 required");
    if (!(tau > 0.0)) throw contract_error("WeightSystem: tau > 0 required");
    if (!(delta > 0.0) || delta > 0.5) throw contract_error("WeightSystem: delta in (0, 1/2] required");

    const double quarter = 0.25 * B.length();
    b0_ = Interval{B.midpoint() - quarter, B.midpoint() + quarter};
    x0_ = b0_.midpoint();

    const double margin = 0.1 * mesh.length;
    c_psi_ = (mesh.length + margin) * (mesh.length + margin) + 1.0;
    k_ = c_psi_ + 1.0;

    // psi > 0 and phi_lower < 0 on the enlarged neighborhood, and
    // |psi'| >= c > 0 away from B0, checked pointwise on the mesh. Points
    // outside B0 sit at least a quarter of |B| from the vertex.
    const double slope_floor = 0.5 * B.length() * (1.0 - 1e-12);
    for (int i = 0; i <= mesh.interior + 1; ++i) {
        const double x = mesh.primal(i);
        if (!(psi(x) > 0.0)) throw contract_error("WeightSystem: psi not positive at a mesh point");
        if (!(phi_lower(x) < 0.0)) throw contract_error("WeightSystem: phi_lower not negative at a mesh point");
        if (!b0_.contains(x) && !(std::abs(psi_prime(x)) >= slope_floor))
            throw contract_error("WeightSystem: |psi'| lost its lower bound outside B0");
    }
    for (double x : {-margin, mesh.length + margin}) {
        if (!(psi(x) > 0.0)) throw contract_error("WeightSystem: psi not positive on the enlarged domain");
    }
}

double WeightSystem::phi_upper(double x) const { return std::exp(lambda_ * psi(x)); }

double WeightSystem::phi_lower(double x) const {
    return std::exp(lambda_ * psi(x)) - std::exp(lambda_ * k_);
}

double WeightSystem::phi_lower_prime(double x) const {
    return lambda_ * psi_prime(x) * std::exp(lambda_ * psi(x));
}

double WeightSystem::phi_lower_second(double x) const {
    const double p = psi_prime(x);
    return (lambda_ * (-2.0) + lambda_ * lambda_ * p * p) * std::exp(lambda_ * psi(x));
}

double WeightSystem::theta(double t) const {
    const double T = grid_.horizon;
    const double lo = t + delta_ * T;
    const double hi = T + delta_ * T - t;
    if (!(lo > 0.0) || !(hi > 0.0))
        throw std::domain_error("theta: t outside the non-singular window (-delta T, T + delta T)");
    return 1.0 / (lo * hi);
}

double WeightSystem::theta_prime(double t) const {
    const double th = theta(t);
    return (2.0 * t - grid_.horizon) * th * th;
}

WeightSystem make_weight_system(const SpaceMesh& mesh, const TimeGrid& grid, Interval B,
                                const ParameterLedger& ledger) {
    return WeightSystem(mesh, grid, B, ledger.config.lambda, ledger.tau, ledger.delta);
}

} // namespace fdc
