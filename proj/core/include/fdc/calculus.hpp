#pragma once

#include "fdc/mesh.hpp"

namespace fdc {

// Staggered first-order operators. Differences and averages move a field
// between the primal and dual meshes; none of them extrapolate, so the source
// placement fully determines the target one.

/// (d_h u)_{i+1/2} = (u_{i+1} - u_i)/h. PrimalWithBoundary -> Dual.
SpaceField diff_primal_to_dual(const SpaceField& u);
/// (dbar_h u)_i = (u_{i+1/2} - u_{i-1/2})/h. Dual -> PrimalInterior.
SpaceField diff_dual_to_primal(const SpaceField& u);
/// (m_h u)_{i+1/2} = (u_{i+1} + u_i)/2. PrimalWithBoundary -> Dual.
SpaceField avg_primal_to_dual(const SpaceField& u);
/// (mbar_h u)_i = (u_{i+1/2} + u_{i-1/2})/2. Dual -> PrimalInterior.
SpaceField avg_dual_to_primal(const SpaceField& u);
/// Delta_h = dbar_h ∘ d_h: the (1,-2,1)/h^2 stencil on interior points.
SpaceField laplacian(const SpaceField& u);

/// Attach boundary values to an interior field (Dirichlet data).
SpaceField with_boundary(const SpaceField& interior, double left = 0.0, double right = 0.0);
/// Interior part of a field stored with boundary.
SpaceField strip_boundary(const SpaceField& u);

/// Laplacian of an interior field under homogeneous Dirichlet conditions.
SpaceField laplacian_dirichlet(const SpaceField& interior);
/// d_h of an interior field with zero boundary values (N+1 dual values).
SpaceField diff_dirichlet(const SpaceField& interior);

/// k-th eigenvalue of -Delta_h with Dirichlet conditions, k in [1,N]:
/// mu_k = (4/h^2) sin^2(k pi h / (2 L)).
double laplacian_eigenvalue(const SpaceMesh& m, int k);
/// Eigenvector sin(k pi x / L) sampled on the interior points.
SpaceField laplacian_eigenvector(const SpaceMesh& m, int k);

/// (D_t u)^{n+1/2} = (u^{n+1} - u^n)/dt. PrimalClosed -> Dual.
TimeSeries time_diff_forward(const TimeSeries& u);
/// (Dbar_t u)^n = (u^{n+1/2} - u^{n-1/2})/dt. DualExtended -> Primal.
TimeSeries time_diff_backward(const TimeSeries& u);

/// t+ : u^{n+1/2} := u^{n+1}. PrimalClosed -> Dual.
TimeSeries shift_plus(const TimeSeries& u);
/// t- : u^{n+1/2} := u^n. PrimalClosed -> Dual.
TimeSeries shift_minus(const TimeSeries& u);
/// tbar+ : u^n := u^{n+1/2}. DualExtended -> Primal.
TimeSeries shift_bar_plus(const TimeSeries& u);
/// tbar- : u^n := u^{n-1/2}. DualExtended (or Dual) -> Primal.
TimeSeries shift_bar_minus(const TimeSeries& u);

// Field-level versions, applied slice by slice (space ops) or column by
// column (time ops).
GridFunction time_diff_backward(const GridFunction& u);
GridFunction time_diff_forward(const GridFunction& u);
GridFunction shift_bar_minus(const GridFunction& u);
GridFunction shift_bar_plus(const GridFunction& u);
GridFunction shift_plus(const GridFunction& u);

} // namespace fdc
