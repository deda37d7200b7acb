#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "dense_oracle.hpp"
#include "fdc/calculus.hpp"
#include "fdc/hum.hpp"
#include "fdc/rng.hpp"

using namespace fdc;

namespace {

// Desk-feasible weight constants (see configs/): eps0 = 0.5, tau2 = 0.25,
// delta1 = 0.45 give h1 ~ 0.065 at T = 0.5.
CalibrationConfig desk_weights() {
    CalibrationConfig cfg;
    cfg.eps0 = 0.5;
    cfg.tau2 = 0.2;
    cfg.delta1 = 0.45;
    return cfg;
}

ControlProblem reference_problem(int N = 39, int M = 8, double T = 0.5) {
    ControlProblem p;
    p.mesh = SpaceMesh::uniform(1.0, N);
    p.grid = TimeGrid::uniform(T, M);
    p.omega = Interval{0.3, 0.8};
    p.a = PotentialField::zero(p.mesh, p.grid);
    p.weights = desk_weights();
    SpaceField g(p.mesh, SpacePlacement::PrimalInterior);
    const auto s1 = laplacian_eigenvector(p.mesh, 1);
    const auto s3 = laplacian_eigenvector(p.mesh, 3);
    for (int i = 0; i < g.size(); ++i) g[i] = s1[i] + 0.3 * s3[i];
    p.g = g;
    return p;
}

} // namespace

TEST_CASE("gramian is symmetric and bounded below by the penalty") {
    Rng rng(55);
    auto p = reference_problem(23, 8);
    p.a = PotentialField::sample(p.mesh, p.grid, [&](double, double) { return rng.uniform(-1.0, 1.0); });

    const double phi = p.phi_h();
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> q(static_cast<std::size_t>(p.mesh.interior)), r(q.size());
        for (auto& x : q) x = rng.normal();
        for (auto& x : r) x = rng.normal();

        const auto Aq = gramian_apply(p, q);
        const auto Ar = gramian_apply(p, r);

        double qAr = 0.0, rAq = 0.0, qAq = 0.0, qq = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) {
            qAr += q[i] * Ar[i];
            rAq += r[i] * Aq[i];
            qAq += q[i] * Aq[i];
            qq += q[i] * q[i];
        }
        CHECK(std::abs(qAr - rAq) <= 1e-11 * (1.0 + std::abs(qAr)));
        CHECK(qAq >= phi * qq * (1.0 - 1e-11));
    }

    const std::vector<double> zero(static_cast<std::size_t>(p.mesh.interior), 0.0);
    for (double v : gramian_apply(p, zero)) CHECK(v == 0.0);
}

TEST_CASE("zero initial data gives the zero control") {
    auto p = reference_problem();
    p.g = SpaceField(p.mesh, SpacePlacement::PrimalInterior);
    const auto sol = solve_hum(p);
    CHECK(sol.norm_v == 0.0);
    CHECK(sol.norm_yM == 0.0);
    for (double v : sol.q_hat_T) CHECK(v == 0.0);
    for (double v : sol.y.raw()) CHECK(v == 0.0);
}

TEST_CASE("reference instance: target relation and minimizer properties") {
    const auto p = reference_problem();
    const auto sol = solve_hum(p);

    // y^M = -phi(h) q_hat_T
    const double phi = sol.phi_h;
    double err = 0.0, scale = 0.0;
    for (int i = 0; i < p.mesh.interior; ++i) {
        err = std::max(err, std::abs(sol.y.at(p.grid.steps, i) + phi * sol.q_hat_T[static_cast<std::size_t>(i)]));
        scale = std::max(scale, std::abs(phi * sol.q_hat_T[static_cast<std::size_t>(i)]));
    }
    CHECK(err <= 1e-8 * (1.0 + scale));

    CHECK(sol.cg_residual <= p.cg_tol);
    CHECK(sol.functional_value <= 1e-12); // J(minimizer) <= J(0) = 0

    // Euler-Lagrange residual recomputed outside the CG recursion:
    // (Lambda + phi I) q_hat_T - b with b = -y_free^M.
    {
        const auto y_free = solve_forward(p.g, p.a);
        const auto Aq = gramian_apply(p, sol.q_hat_T);
        double res2 = 0.0, b2 = 0.0;
        for (int i = 0; i < p.mesh.interior; ++i) {
            const double b_i = -y_free.at(p.grid.steps, i);
            const double r_i = Aq[static_cast<std::size_t>(i)] - b_i;
            res2 += r_i * r_i;
            b2 += b_i * b_i;
        }
        CHECK(std::sqrt(res2) <= p.cg_tol * std::sqrt(b2) * 10.0);
    }

    // control support: exactly zero off omega
    for (int n = 0; n < p.grid.steps; ++n)
        for (int i = 0; i < p.mesh.interior; ++i)
            if (!p.omega.contains(p.mesh.primal(i + 1))) CHECK(sol.v.at(n, i) == 0.0);

    CHECK(sol.ledger.feasible());
}

TEST_CASE("matrix-free minimizer agrees with the dense-Gramian oracle") {
    Rng rng(9);
    auto p = reference_problem(19, 6);
    p.weights.eps0 = 1.0; // the oracle cross-checks algebra; loosen the coupling budget
    p.a = PotentialField::sample(p.mesh, p.grid, [&](double, double) { return rng.uniform(-0.5, 0.5); });

    const auto sol = solve_hum(p);

    // Dense route: propagation matrices P_n = S_{n+1} ... S_M with
    // S_n = (I + dt(-Lap + a^n))^{-1}; Lambda = sum dt P_n^T D_omega P_n.
    const int N = p.mesh.interior;
    const int M = p.grid.steps;
    std::vector<oracle::Dense> S;
    S.reserve(static_cast<std::size_t>(M));
    for (int n = 1; n <= M; ++n) {
        const auto slice = p.a.slice(n);
        S.push_back(oracle::inverse(oracle::heat_step_matrix(
            p.mesh.h, p.grid.dt, std::vector<double>(slice.begin(), slice.end()))));
    }

    oracle::Dense lambda(static_cast<std::size_t>(N));
    oracle::Dense P = oracle::Dense::identity(static_cast<std::size_t>(N)); // P_M
    for (int n = M - 1; n >= 0; --n) {
        P = oracle::matmul(S[static_cast<std::size_t>(n)], P); // P_n = S_{n+1} P_{n+1}
        oracle::Dense masked = P;
        for (int i = 0; i < N; ++i)
            if (!p.omega.contains(p.mesh.primal(i + 1)))
                for (int j = 0; j < N; ++j) masked.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = 0.0;
        for (int r = 0; r < N; ++r)
            for (int c = 0; c < N; ++c) {
                double acc = 0.0;
                for (int k = 0; k < N; ++k)
                    acc += masked.at(static_cast<std::size_t>(k), static_cast<std::size_t>(r)) *
                           masked.at(static_cast<std::size_t>(k), static_cast<std::size_t>(c));
                lambda.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) += p.grid.dt * acc;
            }
    }

    // b = -y_free^M densely
    std::vector<double> y = p.g.v;
    for (int n = 0; n < M; ++n) y = oracle::matvec(S[static_cast<std::size_t>(n)], y);
    std::vector<double> b(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) b[i] = -y[i];

    oracle::Dense system = lambda;
    const double phi = p.phi_h();
    for (int i = 0; i < N; ++i)
        system.at(static_cast<std::size_t>(i), static_cast<std::size_t>(i)) += phi;
    const auto q_dense = oracle::lu_solve(system, b);

    for (int i = 0; i < N; ++i)
        CHECK(std::abs(sol.q_hat_T[static_cast<std::size_t>(i)] - q_dense[static_cast<std::size_t>(i)]) <=
              1e-8 * (1.0 + std::abs(q_dense[static_cast<std::size_t>(i)])));
}

TEST_CASE("long-horizon driver: controlled phase then free decay") {
    ControlProblem p = reference_problem();
    p.grid = TimeGrid::uniform(1.5, 30); // dt = 0.05
    p.a = PotentialField::zero(p.mesh, p.grid);

    const auto sol = solve_hum_long_horizon(p, 0.5);
    REQUIRE(sol.phase_split.has_value());
    const int M0 = *sol.phase_split;
    CHECK(M0 == 10);

    for (int n = M0; n < p.grid.steps; ++n)
        for (int i = 0; i < p.mesh.interior; ++i) CHECK(sol.v.at(n, i) == 0.0);

    CHECK(sol.norm_yM <= *sol.norm_y_phase1 * (1.0 + 1e-13));
    for (int n = M0; n < p.grid.steps; ++n) {
        const double before = norm_L2(sol.y.slice_field(n));
        const double after = norm_L2(sol.y.slice_field(n + 1));
        if (before > 0.0) CHECK(after < before);
    }

    CHECK_THROWS_AS(solve_hum(p), infeasible_error); // T >= 1 needs this driver
}

TEST_CASE("semilinear fixed point: degenerate nonlinearities") {
    SUBCASE("zero function converges in one sweep to the linear solution") {
        auto p = reference_problem();
        p.f.f = [](double) { return 0.0; };
        p.f.fprime0 = 0.0;
        p.f.lipschitz = 0.0;
        p.f.name = "zero";
        const auto sol = solve_semilinear(p);
        REQUIRE(sol.picard_iterations.has_value());
        CHECK(*sol.picard_iterations == 1);
        CHECK(*sol.picard_converged);

        auto lin = reference_problem();
        const auto ref = solve_hum(lin);
        for (std::size_t i = 0; i < sol.q_hat_T.size(); ++i)
            CHECK(sol.q_hat_T[i] == doctest::Approx(ref.q_hat_T[i]).epsilon(1e-12));
    }

    SUBCASE("linear nonlinearity f(s) = c s converges in at most two sweeps") {
        auto p = reference_problem();
        const double c = 0.8;
        p.f.f = [c](double s) { return c * s; };
        p.f.fprime0 = c;
        p.f.lipschitz = c;
        p.f.name = "linear";
        const auto sol = solve_semilinear(p);
        REQUIRE(sol.picard_iterations.has_value());
        CHECK(*sol.picard_iterations <= 2);
        CHECK(*sol.picard_converged);

        auto lin = reference_problem();
        lin.a = PotentialField::constant(c, lin.mesh, lin.grid);
        const auto ref = solve_hum(lin);
        for (std::size_t i = 0; i < sol.q_hat_T.size(); ++i)
            CHECK(sol.q_hat_T[i] == doctest::Approx(ref.q_hat_T[i]).epsilon(1e-9));
    }
}

TEST_CASE("semilinear sine problem stays within the linear budget") {
    auto p = reference_problem();
    p.f = Nonlinearity::sine();
    SpaceField g = p.g;
    for (int i = 0; i < g.size(); ++i) g[i] *= 0.1;
    p.g = g;

    const auto sol = solve_semilinear(p);
    REQUIRE(sol.picard_converged.has_value());
    CHECK(*sol.picard_converged);
    CHECK(*sol.picard_iterations <= 50);

    auto lin = reference_problem();
    lin.g = g;
    lin.a = PotentialField::constant(1.0, lin.mesh, lin.grid);
    const auto ref = solve_hum(lin);

    const double bound = std::sqrt(ref.phi_h) * ref.norm_g;
    const double lin_ratio = ref.norm_yM / bound;
    CHECK(sol.norm_yM / (std::sqrt(sol.phi_h) * sol.norm_g) <= 3.0 * lin_ratio);
}

TEST_CASE("problem validation rejects bad windows") {
    auto p = reference_problem();
    p.omega = Interval{0.9, 0.4};
    CHECK_THROWS_AS(p.validate(), contract_error);
    p.omega = Interval{0.0, 1.2};
    CHECK_THROWS_AS(p.validate(), contract_error);
}
