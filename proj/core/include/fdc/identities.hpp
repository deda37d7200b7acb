#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fdc/calculus.hpp"
#include "fdc/mesh.hpp"
#include "fdc/rng.hpp"

namespace fdc {

/// Exact algebraic identities of the staggered calculus. Each one holds to
/// rounding error for arbitrary inputs of the documented placements; the
/// suite checks them against randomly drawn fields.
enum class Identity {
    SpaceProductRule,       // d(fg) = df<g> + <f>dg, both mesh directions
    SpaceAverageProduct,    // <fg> = <f><g> + (h^2/4) df dg
    SpaceDoubleAverage,     // mbar(m f) = f + (h^2/4) Lap f
    SpaceIntegrationByParts,// int f dbar(g) = -int d(f) g + boundary terms
    SpaceShiftedAverage,    // int f mbar(g) = int m(f) g - (h/2) boundary terms
    TimeProductRule,        // Dbar(g1 g2), both shift pairings
    TimeSquareShiftPlus,    // tbar+ f Dbar f = Dbar(f^2)/2 + (dt/2)(Dbar f)^2
    TimeSquareShiftMinus,   // tbar- f Dbar f = Dbar(f^2)/2 - (dt/2)(Dbar f)^2
    TimeTransferPlus,       // dual integral of (t+ u) v = primal integral of u tbar- v
    TimeTransferMinus,      // t- transfer with end corrections
    TimeIntegrationByParts, // dual integral of (Dt u) v, end terms, primal integral of u Dbar v
    TimePartsDualGrid,      // same-grid parts for dual-extended pairs
    TimePartsPrimalGrid,    // same-grid parts for primal-closed pairs
};

std::vector<Identity> all_identities();
const char* to_string(Identity id);
std::optional<Identity> identity_from_string(const std::string& name);

/// |LHS - RHS| / (1 + |LHS|), with vector identities reduced through the max
/// norm. The additive 1 guards the quotient on trivial inputs.
double rel_residual(double lhs, double rhs);
double rel_residual(const std::vector<double>& lhs, const std::vector<double>& rhs);

// Explicit-input evaluations; inputs must carry the documented placements.
double residual_space_product_rule(const SpaceField& f1, const SpaceField& f2);
double residual_space_average_product(const SpaceField& f1, const SpaceField& f2);
double residual_space_double_average(const SpaceField& f);
double residual_space_integration_by_parts(const SpaceField& f, const SpaceField& g);
double residual_space_shifted_average(const SpaceField& f, const SpaceField& g);
double residual_time_product_rule(const TimeSeries& g1, const TimeSeries& g2);
double residual_time_square_shift_plus(const TimeSeries& f);
double residual_time_square_shift_minus(const TimeSeries& f);
double residual_time_transfer_plus(const TimeSeries& u, const TimeSeries& v);
double residual_time_transfer_minus(const TimeSeries& u, const TimeSeries& v);
double residual_time_integration_by_parts(const TimeSeries& u, const TimeSeries& v);
double residual_time_parts_dual_grid(const TimeSeries& f, const TimeSeries& g);
double residual_time_parts_primal_grid(const TimeSeries& f, const TimeSeries& g);

/// Draw random inputs of the right shape for `id` and return the residual.
double identity_trial(Identity id, const SpaceMesh& m, const TimeGrid& g, Rng& rng);

struct IdentityRecord {
    Identity id;
    double max_residual = 0.0;
    int trials = 0;
    bool pass = true;
};

struct IdentitySuiteResult {
    std::vector<IdentityRecord> records;
    double tolerance = 0.0;
    bool all_pass() const;
};

/// Run `trials_per_grid` random trials of every identity on the cross product
/// of the given grid sizes. `inject_break`, when set to an identity name,
/// forces that identity's residual above tolerance (negative-control hook).
IdentitySuiteResult run_identity_suite(const std::vector<int>& space_sizes,
                                       const std::vector<int>& time_sizes,
                                       int trials_per_grid, std::uint64_t seed,
                                       double tolerance = 1e-12,
                                       const std::string& inject_break = {});

} // namespace fdc
