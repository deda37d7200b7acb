#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fdc/audit.hpp"
#include "fdc/calculus.hpp"
#include "fdc/rng.hpp"

using namespace fdc;

namespace {

struct AuditSetup {
    SpaceMesh mesh = SpaceMesh::uniform(1.0, 40);
    TimeGrid grid = TimeGrid::uniform(0.5, 40);
    Interval omega{0.3, 0.8};
    CalibrationConfig cfg;
    ParameterLedger ledger;
    WeightSystem weights;

    AuditSetup()
        : cfg{/*eps0*/ 0.5, /*tau2*/ 0.2, /*delta1*/ 0.45, /*lambda*/ 2.0, /*h0*/ 1.0, /*theta_exp*/ 4},
          ledger(calibrate(grid.horizon, mesh.h, grid.dt, 0.0, cfg)),
          weights(make_weight_system(mesh, grid, omega, ledger)) {}
};

GridFunction adjoint_sample(const AuditSetup& s, const SpaceField& q_T) {
    return solve_adjoint(q_T, PotentialField::zero(s.mesh, s.grid));
}

ControlProblem audit_problem(const AuditSetup& s) {
    ControlProblem p;
    p.mesh = s.mesh;
    p.grid = s.grid;
    p.omega = s.omega;
    p.a = PotentialField::zero(s.mesh, s.grid);
    p.g = SpaceField(s.mesh, SpacePlacement::PrimalInterior);
    p.weights = s.cfg;
    return p;
}

} // namespace

TEST_CASE("zero field: all terms zero, ratio undefined") {
    const AuditSetup s;
    const GridFunction q(s.mesh, s.grid, SpacePlacement::PrimalInterior, TimePlacement::DualExtended);
    const auto rep = carleman_sides(q, s.weights, s.ledger, s.omega, AuditMode::Backward);
    CHECK(rep.lhs_total() == 0.0);
    CHECK(rep.rhs_total() == 0.0);
    CHECK(!rep.ratio().has_value());
}

TEST_CASE("adjoint-generated fields give finite terms and quadratic homogeneity") {
    const AuditSetup s;
    Rng rng(100);
    SpaceField q_T(s.mesh, SpacePlacement::PrimalInterior);
    for (int i = 0; i < q_T.size(); ++i) q_T[i] = rng.normal();
    const auto q = adjoint_sample(s, q_T);

    const auto rep = carleman_sides(q, s.weights, s.ledger, s.omega, AuditMode::Backward);
    for (double term : {rep.lhs_time, rep.lhs_grad_dual, rep.lhs_grad_avg, rep.lhs_zero_order,
                        rep.rhs_source, rep.rhs_local, rep.rhs_endpoint_first, rep.rhs_endpoint_last}) {
        CHECK(std::isfinite(term));
        CHECK(term >= 0.0);
    }
    REQUIRE(rep.ratio().has_value());
    CHECK(std::isfinite(*rep.ratio()));

    // the field solves the homogeneous adjoint system, so the source term is
    // solver roundoff and the right side reduces to local + endpoint terms
    CHECK(rep.rhs_source <= 1e-20 * rep.rhs_total());

    GridFunction scaled = q;
    for (auto& v : scaled.raw()) v *= 10.0;
    const auto rep10 = carleman_sides(scaled, s.weights, s.ledger, s.omega, AuditMode::Backward);
    CHECK(rep10.lhs_total() == doctest::Approx(100.0 * rep.lhs_total()).epsilon(1e-12));
    CHECK(rep10.rhs_total() == doctest::Approx(100.0 * rep.rhs_total()).epsilon(1e-12));
    CHECK(*rep10.ratio() == doctest::Approx(*rep.ratio()).epsilon(1e-12));
}

TEST_CASE("ratio concentration over Gaussian-seeded samples") {
    const AuditSetup s;
    Rng rng(2025);
    std::vector<double> ratios;
    for (int k = 0; k < 50; ++k) {
        SpaceField q_T(s.mesh, SpacePlacement::PrimalInterior);
        for (int i = 0; i < q_T.size(); ++i) q_T[i] = rng.normal();
        const auto rep = carleman_sides(adjoint_sample(s, q_T), s.weights, s.ledger, s.omega,
                                        AuditMode::Backward);
        REQUIRE(rep.ratio().has_value());
        ratios.push_back(*rep.ratio());
    }
    std::sort(ratios.begin(), ratios.end());
    const double median = ratios[ratios.size() / 2];
    CHECK(ratios.back() <= 10.0 * median);
}

TEST_CASE("forward audit of the reversed field reproduces the backward terms") {
    const AuditSetup s;
    Rng rng(4242);
    for (int trial = 0; trial < 5; ++trial) {
        SpaceField q_T(s.mesh, SpacePlacement::PrimalInterior);
        for (int i = 0; i < q_T.size(); ++i) q_T[i] = rng.normal();
        const auto q = adjoint_sample(s, q_T);
        const auto bwd = carleman_sides(q, s.weights, s.ledger, s.omega, AuditMode::Backward);

        GridFunction rev(s.mesh, s.grid, SpacePlacement::PrimalInterior, TimePlacement::PrimalClosed);
        for (int n = 0; n <= s.grid.steps; ++n) rev.set_slice(n, q.slice(s.grid.steps - n));
        const auto fwd = carleman_sides(rev, s.weights, s.ledger, s.omega, AuditMode::Forward);

        // The Q-sums and the local/source terms correspond exactly under
        // t -> T - t; the h^-2 endpoint terms are weighted at different
        // instants by construction and are not compared.
        CHECK(fwd.lhs_time == doctest::Approx(bwd.lhs_time).epsilon(1e-10));
        CHECK(fwd.lhs_grad_dual == doctest::Approx(bwd.lhs_grad_dual).epsilon(1e-10));
        CHECK(fwd.lhs_grad_avg == doctest::Approx(bwd.lhs_grad_avg).epsilon(1e-10));
        CHECK(fwd.lhs_zero_order == doctest::Approx(bwd.lhs_zero_order).epsilon(1e-10));
        CHECK(fwd.rhs_source == doctest::Approx(bwd.rhs_source).epsilon(1e-10));
        CHECK(fwd.rhs_local == doctest::Approx(bwd.rhs_local).epsilon(1e-10));
    }
}

TEST_CASE("infeasible ledger is rejected by name") {
    const AuditSetup s;
    ParameterLedger bad = s.ledger;
    bad.cond_space_lhs = 10.0 * bad.config.eps0;
    const GridFunction q(s.mesh, s.grid, SpacePlacement::PrimalInterior, TimePlacement::DualExtended);
    CHECK_THROWS_WITH_AS(carleman_sides(q, s.weights, bad, s.omega, AuditMode::Backward),
                         doctest::Contains("tau h"), infeasible_error);
}

TEST_CASE("observability: zero terminal datum is excluded as 0/0") {
    const AuditSetup s;
    const auto p = audit_problem(s);
    const SpaceField zero(s.mesh, SpacePlacement::PrimalInterior);
    CHECK(!observability_ratio(p, zero).has_value());
    const auto one = laplacian_eigenvector(s.mesh, 1);
    REQUIRE(observability_ratio(p, one).has_value());
    CHECK(std::isfinite(*observability_ratio(p, one)));
}

TEST_CASE("observability: full observation is bounded by the time window") {
    const AuditSetup s;
    auto p = audit_problem(s);
    p.omega = Interval{0.0, 1.0}; // every interior point observed
    Rng rng(7);
    const auto rep = estimate_observability(p, 20, rng);
    CHECK(rep.max_ratio <= 1.0 / std::sqrt(p.grid.horizon) * (1.0 + 1e-12));
    CHECK(rep.max_ratio > 0.0);
    CHECK(std::isfinite(rep.reference_constant));
}

TEST_CASE("observability ratios grow when the window shrinks") {
    const AuditSetup s;
    auto p_big = audit_problem(s);
    auto p_small = audit_problem(s);
    p_small.omega = Interval{0.425, 0.675}; // contained in (0.3, 0.8)

    Rng rng_a(99), rng_b(99); // identical sample streams
    const auto rep_big = estimate_observability(p_big, 30, rng_a);
    const auto rep_small = estimate_observability(p_small, 30, rng_b);
    REQUIRE(rep_big.samples.size() == rep_small.samples.size());
    for (std::size_t k = 0; k < rep_big.samples.size(); ++k)
        CHECK(rep_small.samples[k].ratio >= rep_big.samples[k].ratio * (1.0 - 1e-12));
}

TEST_CASE("weight-derivative residuals converge at second order") {
    const AuditSetup s;
    const double t = 0.2;
    const auto rows = audit_weight_orders(s.weights, t, 0.7, 1.0 / 40.0);
    REQUIRE(rows.size() == 3);
    for (const auto& row : rows) {
        INFO(row.residual);
        CHECK(row.order_coarse >= 1.9);
        CHECK(row.order_fine >= 1.9);
    }
    // at the parabola vertex the leading term vanishes
    CHECK(weight_gradient_residual_at_vertex(s.weights, t, 1.0 / 40.0) <= 1e-10);
}
