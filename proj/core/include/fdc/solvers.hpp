#pragma once

#include <functional>
#include <string>

#include "fdc/mesh.hpp"
#include "fdc/tridiag.hpp"

namespace fdc {

/// Potential a^n_i on the primal instants t_1..t_M and interior points,
/// time-major. The forward step n -> n+1 applies a^{n+1}; the backward
/// (adjoint) step from t_{n+1/2} to t_{n-1/2} applies a^n.
class PotentialField {
public:
    PotentialField() = default;
    PotentialField(SpaceMesh m, TimeGrid g, std::vector<double> values);

    static PotentialField zero(SpaceMesh m, TimeGrid g);
    static PotentialField constant(double c, SpaceMesh m, TimeGrid g);
    static PotentialField sample(SpaceMesh m, TimeGrid g, const std::function<double(double, double)>& a_tx);

    /// n in [1,M], i in [1,N].
    double at(int n, int i) const { return v_[idx(n, i)]; }
    std::span<const double> slice(int n) const {
        return {v_.data() + idx(n, 1), static_cast<std::size_t>(mesh_.interior)};
    }

    double norm_inf() const { return norm_inf_; }
    const SpaceMesh& mesh() const { return mesh_; }
    const TimeGrid& grid() const { return grid_; }
    bool empty() const { return v_.empty(); }

private:
    std::size_t idx(int n, int i) const {
        return static_cast<std::size_t>(n - 1) * static_cast<std::size_t>(mesh_.interior) +
               static_cast<std::size_t>(i - 1);
    }

    SpaceMesh mesh_;
    TimeGrid grid_;
    std::vector<double> v_;
    double norm_inf_ = 0.0;
};

/// Globally Lipschitz nonlinearity f with f(0) = 0, together with the frozen
/// coefficient g(s) = f(s)/s (g(0) = f'(0)) used by the linearized sweeps.
struct Nonlinearity {
    std::function<double(double)> f;
    double fprime0 = 0.0;
    double lipschitz = 0.0;
    std::string name = "none";

    bool empty() const { return !f; }
    double frozen_coefficient(double s) const;

    static Nonlinearity none() { return {}; }
    static Nonlinearity sine();
    /// Piecewise-linear interpolant through (xs, ys); requires f(0) = 0.
    static Nonlinearity table(std::vector<double> xs, std::vector<double> ys);
};

/// Implicit-Euler march of the controlled heat system
///   (y^{n+1} - y^n)/dt - Delta_h y^{n+1} + a^{n+1} y^{n+1} = 1_omega v^{n+1/2}
/// with homogeneous Dirichlet conditions. Requires dt |a| < 1/4. The control
/// v lives on the dual instants (time placement Dual); its indicator mask is
/// applied inside. Returns the trajectory on t_0..t_M.
GridFunction solve_forward(const SpaceField& g, const PotentialField& a);
GridFunction solve_forward(const SpaceField& g, const PotentialField& a, const GridFunction& v,
                           const Interval& omega);

/// Backward adjoint march
///   (q^{n-1/2} - q^{n+1/2})/dt - Delta_h q^{n-1/2} + a^n q^{n-1/2} = 0,
/// q^{M+1/2} = q_T. Returns the trajectory on the extended dual instants
/// t_{1/2}..t_{M+1/2}.
GridFunction solve_adjoint(const SpaceField& q_T, const PotentialField& a);

/// One implicit step of the semilinear system with the nonlinearity frozen at
/// the supplied iterate slice: potential g(zeta_i) per node. v_slice may be
/// empty (free step). Throws on non-finite nonlinearity evaluations.
std::vector<double> semilinear_step(const SpaceMesh& mesh, double dt, std::span<const double> y_prev,
                                    std::span<const double> v_slice, std::span<const double> zeta_slice,
                                    const Nonlinearity& f);

/// Frozen-coefficient potential g(zeta^n_i) from a trajectory iterate.
PotentialField frozen_potential(const GridFunction& zeta, const Nonlinearity& f);

} // namespace fdc
