#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fdc/calculus.hpp"
#include "fdc/rng.hpp"

using namespace fdc;

TEST_CASE("difference operators are exact on polynomials") {
    const auto m = SpaceMesh::uniform(1.0, 7);
    const auto lin = SpaceField::sample(m, SpacePlacement::PrimalWithBoundary, [](double x) { return x; });
    const auto d = diff_primal_to_dual(lin);
    for (int i = 0; i < d.size(); ++i) CHECK(d[i] == doctest::Approx(1.0).epsilon(1e-14));

    const auto quad = SpaceField::sample(m, SpacePlacement::PrimalWithBoundary, [](double x) { return x * x; });
    const auto lap = laplacian(quad);
    for (int i = 0; i < lap.size(); ++i) CHECK(lap[i] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("hand stencil: unit spike") {
    const auto m = SpaceMesh::uniform(1.0, 3); // h = 0.25
    const SpaceField u(m, SpacePlacement::PrimalInterior, {0.0, 1.0, 0.0});
    const auto d = diff_dirichlet(u);
    CHECK(d[0] == doctest::Approx(0.0));
    CHECK(d[1] == doctest::Approx(4.0));
    CHECK(d[2] == doctest::Approx(-4.0));
    CHECK(d[3] == doctest::Approx(0.0));
}

TEST_CASE("backward time difference") {
    const auto g = TimeGrid::uniform(1.0, 4);
    const auto tt = TimeSeries::sample(g, TimePlacement::DualExtended, [](double t) { return t; });
    const auto d = time_diff_backward(tt);
    for (int n = 0; n < d.size(); ++n) CHECK(d[n] == doctest::Approx(1.0).epsilon(1e-14));

    const auto c = TimeSeries::sample(g, TimePlacement::DualExtended, [](double) { return 3.5; });
    const auto dc = time_diff_backward(c);
    for (int n = 0; n < dc.size(); ++n) CHECK(dc[n] == 0.0);

    const auto g2 = TimeGrid::uniform(1.0, 2); // dt = 0.5
    const TimeSeries u(g2, TimePlacement::DualExtended, {1.0, 3.0, 2.0});
    const auto du = time_diff_backward(u);
    CHECK(du[0] == doctest::Approx(4.0));
    CHECK(du[1] == doctest::Approx(-2.0));
}

TEST_CASE("discrete Laplacian eigenpairs") {
    const auto m = SpaceMesh::uniform(1.0, 16);
    for (int k = 1; k <= m.interior; ++k) {
        const auto w = laplacian_eigenvector(m, k);
        const auto lap = laplacian_dirichlet(w);
        const double mu = laplacian_eigenvalue(m, k);
        for (int i = 0; i < w.size(); ++i)
            CHECK(std::abs(lap[i] + mu * w[i]) <= 1e-12 * mu * norm_Linf(w));
    }
}

TEST_CASE("average of gradient is the wide centered difference") {
    Rng rng(5);
    const auto m = SpaceMesh::uniform(1.3, 12);
    SpaceField p(m, SpacePlacement::PrimalWithBoundary);
    for (int i = 0; i < p.size(); ++i) p[i] = rng.normal();

    const auto narrow = avg_dual_to_primal(diff_primal_to_dual(p));
    for (int i = 0; i < narrow.size(); ++i) {
        const double wide = (p[i + 2] - p[i]) / (2.0 * m.h);
        CHECK(std::abs(narrow[i] - wide) <= 1e-13 * (1.0 + std::abs(wide)));
    }
}

TEST_CASE("placement contracts are enforced") {
    const auto m = SpaceMesh::uniform(1.0, 4);
    const SpaceField interior(m, SpacePlacement::PrimalInterior);
    CHECK_THROWS_AS(diff_primal_to_dual(interior), contract_error);
    const SpaceField dual(m, SpacePlacement::Dual);
    CHECK_THROWS_AS(avg_primal_to_dual(dual), contract_error);

    const auto g = TimeGrid::uniform(1.0, 3);
    const TimeSeries primal(g, TimePlacement::Primal);
    CHECK_THROWS_AS(time_diff_backward(primal), contract_error);
    CHECK_THROWS_AS(time_diff_forward(primal), contract_error);
}
