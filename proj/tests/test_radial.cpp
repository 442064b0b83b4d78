#include <cmath>

#include "doctest.h"
#include "steklimit/radial_spectral.hpp"
#include "support/oracles.hpp"

using namespace stek;

namespace {
ConcentratingWeight unit_weight(double a, int n) {
    return ConcentratingWeight(BoundaryWeight::constant(1.0, n), a, n);
}
}  // namespace

TEST_CASE("grid construction honors the layer rule") {
    RadialGrid g = make_radial_grid(400, 0.0125, 3);
    CHECK(g.r.front() == 0.0);
    CHECK(g.r.back() == 1.0);
    for (std::size_t i = 1; i < g.r.size(); ++i) CHECK(g.r[i] > g.r[i - 1]);
    CHECK(g.h_min() <= 0.0125 / 6.0 + 1e-12);

    // explicit coarse grid triggers the layer error
    RadialGrid coarse = make_radial_grid_kappa(50, 1.0);
    CHECK_THROWS_AS(mode_neumann_on_grid(2, 1, unit_weight(0.0125, 2), coarse), std::domain_error);
}

TEST_CASE("mode-1 eigenvalues against Bessel characterizations") {
    // n=2, a=1 (rho == 2): lambda = (j'_{1,1})^2 / 2
    ModeEigen flat2 = mode_neumann(2, 1, unit_weight(1.0, 2));
    const double j11 = oracles::bessel_j1_prime_root();
    CHECK(std::abs(flat2.value - j11 * j11 / 2.0) <= 1e-4);

    // n=3, l=1, a=1 (rho == 3): lambda = x^2/3 with j_1'(x) = 0
    ModeEigen flat3 = mode_neumann(3, 1, unit_weight(1.0, 3));
    const double x3 = oracles::spherical_j1_prime_root();
    CHECK(std::abs(flat3.value - x3 * x3 / 3.0) <= 1e-3);

    // shooting cross-check over the (n, k, a) matrix
    for (int n : {2, 3}) {
        for (int k : {1, 2}) {
            for (double a : {1.0, 0.5, 0.2}) {
                ModeEigen fd = mode_neumann(n, k, unit_weight(a, n));
                double shot = mode_neumann_shooting(n, k, unit_weight(a, n), fd.value);
                CAPTURE(n);
                CAPTURE(k);
                CAPTURE(a);
                CHECK(std::abs(fd.value - shot) <= 1e-6 * std::max(1.0, shot));
            }
        }
    }

    // mode ordering (interlacing sanity)
    for (int n : {2, 3}) {
        double l1 = mode_neumann(n, 1, unit_weight(0.5, n)).value;
        double l2 = mode_neumann(n, 2, unit_weight(0.5, n)).value;
        double l3 = mode_neumann(n, 3, unit_weight(0.5, n)).value;
        CHECK(l2 > l1);
        CHECK(l3 > l2);
    }

    CHECK_THROWS_AS(mode_neumann(2, 0, unit_weight(0.5, 2)), std::domain_error);
    CHECK_THROWS_AS(
        mode_neumann(2, 1, ConcentratingWeight(BoundaryWeight::fourier(1.0, {0.3}, {}), 0.5, 2)),
        std::domain_error);
}

TEST_CASE("steklov modes are exact") {
    SteklovMode m2 = mode_steklov(2, 1);
    CHECK(m2.exact == 1.0);
    CHECK(std::abs(m2.discrete - 1.0) <= 1e-6);
    SteklovMode m3 = mode_steklov(3, 1);
    CHECK(m3.exact == 1.0);
    CHECK(std::abs(m3.discrete - 1.0) <= 1e-6);
    CHECK(mode_steklov(2, 2).exact == 2.0);
    CHECK(mode_steklov(3, 2, 2000).discrete == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("neumann modes approach the steklov value as a shrinks") {
    std::vector<double> grid = concentration_grid();
    double prev = 1e9;
    std::vector<double> errors;
    for (double a : grid) {
        double lam = mode_neumann(3, 1, unit_weight(a, 3)).value;
        CHECK(lam < prev);  // decreasing toward 1
        prev = lam;
        errors.push_back(std::abs(lam - 1.0));
    }
    double slope =
        std::log(errors.back() / errors.front()) / std::log(grid.back() / grid.front());
    CHECK(slope >= 0.45);
}

TEST_CASE("minimizer distances decrease and collapse") {
    std::vector<double> grid = concentration_grid();
    std::vector<double> dist;
    for (double a : grid) dist.push_back(mode_minimizer_distance(3, 1, unit_weight(a, 3)));
    for (std::size_t i = 1; i < dist.size(); ++i) CHECK(dist[i] < dist[i - 1]);
    CHECK(dist.back() < 0.25 * dist.front());
    CHECK(dist.front() > 0.0);  // distinct eigenfunctions at a = 1
}

TEST_CASE("oracle self-consistency after extrapolation") {
    // Richardson value sits between raw grid values and the refine delta
    // brackets the remaining error against the shooting oracle
    ModeEigen me = mode_neumann(2, 1, unit_weight(0.5, 2));
    double shot = mode_neumann_shooting(2, 1, unit_weight(0.5, 2), me.value);
    CHECK(std::abs(me.value - shot) <= 10.0 * me.refine_delta + 1e-9);
}
