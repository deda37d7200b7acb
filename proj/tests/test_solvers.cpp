#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "dense_oracle.hpp"
#include "fdc/calculus.hpp"
#include "fdc/rng.hpp"
#include "fdc/solvers.hpp"

using namespace fdc;

TEST_CASE("Thomas solve matches dense LU up to N = 16") {
    Rng rng(31);
    for (int N = 2; N <= 16; ++N) {
        const auto mesh = SpaceMesh::uniform(1.0, N);
        const double dt = 0.01;
        std::vector<double> a_slice(static_cast<std::size_t>(N));
        for (auto& a : a_slice) a = rng.uniform(-5.0, 5.0);
        std::vector<double> rhs(static_cast<std::size_t>(N));
        for (auto& r : rhs) r = rng.normal();

        const auto tri = implicit_heat_matrix(mesh.h, dt, a_slice);
        const auto x_thomas = tri.solve(rhs);

        auto A = oracle::heat_step_matrix(mesh.h, dt, a_slice);
        // the dense matrix is dt * (I/dt - Lap + a); rescale the rhs to match
        std::vector<double> rhs_scaled(rhs);
        for (auto& r : rhs_scaled) r *= dt;
        const auto x_dense = oracle::lu_solve(A, rhs_scaled);

        for (int i = 0; i < N; ++i)
            CHECK(std::abs(x_thomas[static_cast<std::size_t>(i)] - x_dense[static_cast<std::size_t>(i)]) <=
                  1e-12 * (1.0 + std::abs(x_dense[static_cast<std::size_t>(i)])));
    }
}

TEST_CASE("single implicit step against the dense oracle, N = 3") {
    const auto mesh = SpaceMesh::uniform(1.0, 3);
    const auto grid = TimeGrid::uniform(0.1, 1);
    const auto a = PotentialField::constant(0.7, mesh, grid);
    const SpaceField g(mesh, SpacePlacement::PrimalInterior, {1.0, -2.0, 0.5});

    const auto y = solve_forward(g, a);
    auto A = oracle::heat_step_matrix(mesh.h, grid.dt, {0.7, 0.7, 0.7});
    const auto y1 = oracle::lu_solve(A, g.v);
    for (int i = 0; i < 3; ++i)
        CHECK(y.at(1, i) == doctest::Approx(y1[static_cast<std::size_t>(i)]).epsilon(1e-13));
}

TEST_CASE("forward eigenmode decay matches the closed form") {
    // 1e-12 relative to the data scale; roundoff in other modes decays slower
    // than a high mode, so relative-to-the-decayed-value is not measurable.
    const auto mesh = SpaceMesh::uniform(1.0, 16);
    const auto grid = TimeGrid::uniform(0.5, 20);
    const auto a = PotentialField::zero(mesh, grid);
    for (int k = 1; k <= mesh.interior; ++k) {
        const auto g = laplacian_eigenvector(mesh, k);
        const double mu = laplacian_eigenvalue(mesh, k);
        const double scale = norm_Linf(g);
        const auto y = solve_forward(g, a);
        for (int n = 0; n <= grid.steps; ++n) {
            const double factor = std::pow(1.0 + grid.dt * mu, -n);
            for (int i = 0; i < mesh.interior; ++i)
                CHECK(std::abs(y.at(n, i) - factor * g[i]) <= 1e-12 * scale);
        }
        // one implicit step resolves the factor sharply
        for (int i = 0; i < mesh.interior; ++i) {
            const double f1 = 1.0 / (1.0 + grid.dt * mu);
            CHECK(std::abs(y.at(1, i) - f1 * g[i]) <= 1e-12 * f1 * scale);
        }
    }
}

TEST_CASE("adjoint eigenmode decay matches the closed form") {
    const auto mesh = SpaceMesh::uniform(1.0, 16);
    const auto grid = TimeGrid::uniform(0.5, 20);
    const auto a = PotentialField::zero(mesh, grid);
    const int M = grid.steps;
    for (int k = 1; k <= mesh.interior; ++k) {
        const auto q_T = laplacian_eigenvector(mesh, k);
        const double mu = laplacian_eigenvalue(mesh, k);
        const double scale = norm_Linf(q_T);
        const auto q = solve_adjoint(q_T, a);
        for (int n = 1; n <= M; ++n) {
            const double factor = std::pow(1.0 + grid.dt * mu, -(M + 1 - n));
            for (int i = 0; i < mesh.interior; ++i)
                CHECK(std::abs(q.at(n - 1, i) - factor * q_T[i]) <= 1e-12 * scale);
        }
        for (int i = 0; i < mesh.interior; ++i) CHECK(q.at(M, i) == q_T[i]);
        for (int i = 0; i < mesh.interior; ++i) {
            const double f1 = 1.0 / (1.0 + grid.dt * mu);
            CHECK(std::abs(q.at(M - 1, i) - f1 * q_T[i]) <= 1e-12 * f1 * scale);
        }
    }
}

TEST_CASE("zero data propagates to zero") {
    const auto mesh = SpaceMesh::uniform(1.0, 8);
    const auto grid = TimeGrid::uniform(0.5, 10);
    const auto a = PotentialField::constant(1.0, mesh, grid);
    const SpaceField zero(mesh, SpacePlacement::PrimalInterior);
    const auto y = solve_forward(zero, a);
    for (double v : y.raw()) CHECK(v == 0.0);
    const auto q = solve_adjoint(zero, a);
    for (double v : q.raw()) CHECK(v == 0.0);
}

TEST_CASE("adjoint dissipativity with potential") {
    Rng rng(8);
    const auto mesh = SpaceMesh::uniform(1.0, 24);
    const auto grid = TimeGrid::uniform(0.5, 32);
    const auto a = PotentialField::sample(mesh, grid, [&](double, double) { return rng.uniform(-3.0, 3.0); });
    const double contraction = std::pow(1.0 - 2.0 * grid.dt * a.norm_inf(), -0.5);

    for (int trial = 0; trial < 20; ++trial) {
        SpaceField q_T(mesh, SpacePlacement::PrimalInterior);
        for (int i = 0; i < q_T.size(); ++i) q_T[i] = rng.normal();
        const auto q = solve_adjoint(q_T, a);
        for (int n = 1; n <= grid.steps; ++n) {
            const double before = norm_L2(q.slice_field(n));
            const double after = norm_L2(q.slice_field(n - 1));
            CHECK(after <= contraction * before * (1.0 + 1e-13));
        }
    }
}

TEST_CASE("free heat flow dissipates energy") {
    Rng rng(77);
    const auto mesh = SpaceMesh::uniform(1.0, 20);
    const auto grid = TimeGrid::uniform(1.0, 25);
    const auto a = PotentialField::zero(mesh, grid);
    SpaceField g(mesh, SpacePlacement::PrimalInterior);
    for (int i = 0; i < g.size(); ++i) g[i] = rng.normal();
    const auto y = solve_forward(g, a);
    for (int n = 0; n < grid.steps; ++n)
        CHECK(norm_L2(y.slice_field(n + 1)) <= norm_L2(y.slice_field(n)) * (1.0 + 1e-14));
}

TEST_CASE("discrete duality over random controlled instances") {
    Rng rng(2024);
    const Interval omega{0.2, 0.7};
    for (int trial = 0; trial < 100; ++trial) {
        const int N = 8 + static_cast<int>(rng.uniform() * 57.0);  // <= 64
        const int M = 16 + static_cast<int>(rng.uniform() * 49.0); // <= 64
        const auto mesh = SpaceMesh::uniform(1.0, N);
        const auto grid = TimeGrid::uniform(0.5, M);
        const auto a =
            PotentialField::sample(mesh, grid, [&](double, double) { return rng.uniform(-5.0, 5.0); });

        SpaceField g(mesh, SpacePlacement::PrimalInterior), q_T(mesh, SpacePlacement::PrimalInterior);
        for (int i = 0; i < N; ++i) {
            g[i] = rng.normal();
            q_T[i] = rng.normal();
        }
        GridFunction v(mesh, grid, SpacePlacement::PrimalInterior, TimePlacement::Dual);
        for (auto& x : v.raw()) x = rng.normal();

        const auto y = solve_forward(g, a, v, omega);
        const auto q = solve_adjoint(q_T, a);

        // sum_n dt <1_omega q^{n+1/2}, v^{n+1/2}> = <y^M, q_T> - <g, q^{1/2}>
        double lhs = 0.0;
        for (int n = 0; n < M; ++n) {
            double acc = 0.0;
            for (int i = 0; i < N; ++i)
                if (omega.contains(mesh.primal(i + 1))) acc += q.at(n, i) * v.at(n, i);
            lhs += grid.dt * mesh.h * acc;
        }
        const double rhs = inner_product_L2(y.slice_field(M), q_T) -
                           inner_product_L2(g, q.slice_field(0));
        CHECK(std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(lhs) + std::abs(rhs)));
    }
}

TEST_CASE("stability precondition is enforced and named") {
    const auto mesh = SpaceMesh::uniform(1.0, 8);
    const auto grid = TimeGrid::uniform(1.0, 4); // dt = 0.25
    const auto a = PotentialField::constant(2.0, mesh, grid); // dt |a| = 0.5
    const SpaceField g(mesh, SpacePlacement::PrimalInterior);
    CHECK_THROWS_WITH_AS(solve_forward(g, a), doctest::Contains("dt |a| < 1/4"), infeasible_error);
    CHECK_THROWS_WITH_AS(solve_adjoint(g, a), doctest::Contains("dt |a| < 1/4"), infeasible_error);
}

TEST_CASE("semilinear step reductions") {
    const auto mesh = SpaceMesh::uniform(1.0, 8);
    const auto grid = TimeGrid::uniform(0.5, 10);
    Rng rng(11);
    std::vector<double> y_prev(8), zeta(8);
    for (auto& x : y_prev) x = rng.normal();
    for (auto& x : zeta) x = rng.normal();

    SUBCASE("zero nonlinearity reduces to the free linear step") {
        Nonlinearity zero_f;
        zero_f.f = [](double) { return 0.0; };
        zero_f.name = "zero";
        const auto step = semilinear_step(mesh, grid.dt, y_prev, {}, zeta, zero_f);

        const auto a = PotentialField::zero(mesh, grid);
        const auto y = solve_forward(SpaceField(mesh, SpacePlacement::PrimalInterior, y_prev), a);
        for (int i = 0; i < 8; ++i)
            CHECK(step[static_cast<std::size_t>(i)] == doctest::Approx(y.at(1, i)).epsilon(1e-14));
    }

    SUBCASE("identity nonlinearity equals the unit potential") {
        Nonlinearity id_f;
        id_f.f = [](double s) { return s; };
        id_f.fprime0 = 1.0;
        id_f.lipschitz = 1.0;
        const auto step = semilinear_step(mesh, grid.dt, y_prev, {}, zeta, id_f);

        const auto a = PotentialField::constant(1.0, mesh, grid);
        const auto y = solve_forward(SpaceField(mesh, SpacePlacement::PrimalInterior, y_prev), a);
        for (int i = 0; i < 8; ++i)
            CHECK(step[static_cast<std::size_t>(i)] == doctest::Approx(y.at(1, i)).epsilon(1e-13));
    }

    SUBCASE("sine nonlinearity frozen at zero gives the unit coefficient") {
        const auto f = Nonlinearity::sine();
        CHECK(f.frozen_coefficient(0.0) == 1.0);
        const std::vector<double> zeta0(8, 0.0);
        const auto step = semilinear_step(mesh, grid.dt, y_prev, {}, zeta0, f);
        const auto a = PotentialField::constant(1.0, mesh, grid);
        const auto y = solve_forward(SpaceField(mesh, SpacePlacement::PrimalInterior, y_prev), a);
        for (int i = 0; i < 8; ++i)
            CHECK(step[static_cast<std::size_t>(i)] == doctest::Approx(y.at(1, i)).epsilon(1e-14));
    }

    SUBCASE("non-finite nonlinearity evaluations are rejected") {
        Nonlinearity bad;
        bad.f = [](double s) { return 1.0 / (s - s); }; // inf for any s
        bad.lipschitz = 1.0;
        CHECK_THROWS_AS(semilinear_step(mesh, grid.dt, y_prev, {}, zeta, bad), contract_error);
    }
}

TEST_CASE("grid mismatch between data and potential is rejected") {
    const auto mesh = SpaceMesh::uniform(1.0, 8);
    const auto other = SpaceMesh::uniform(1.0, 9);
    const auto grid = TimeGrid::uniform(0.5, 10);
    const auto a = PotentialField::zero(mesh, grid);
    const SpaceField g(other, SpacePlacement::PrimalInterior);
    CHECK_THROWS_AS(solve_forward(g, a), contract_error);
}
