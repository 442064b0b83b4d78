#include <cmath>
#include <numbers>
#include <stdexcept>

#include "doctest.h"
#include "steklimit/circle.hpp"
#include "steklimit/quadrature.hpp"

using namespace stek;

namespace {
constexpr double kPi = std::numbers::pi;
ConcentratingWeight unit_weight(double a) {
    return ConcentratingWeight(BoundaryWeight::constant(1.0, 2), a, 2);
}
}  // namespace

TEST_CASE("poisson extension acts as the multiplier r^k") {
    CircleFunction one = CircleFunction::constant(1.0);
    CircleFunction p1 = poisson_extend(one, 0.73);
    CHECK(p1.c0() == 1.0);
    CHECK(p1.degree() == 0);

    CircleFunction coskt = CircleFunction::harmonic(1, 1.0);
    CircleFunction ext = poisson_extend(coskt, 0.5);
    CHECK(ext.cos_coeff(1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(ext(0.0) == doctest::Approx(0.5).epsilon(1e-15));

    CHECK_THROWS_AS(poisson_extend(coskt, 1.0), std::domain_error);
    CHECK_THROWS_AS(poisson_extend(coskt, -0.1), std::domain_error);

    // kernel-quadrature oracle: P_r g from the Poisson kernel integral
    CircleFunction g = CircleFunction::random(8, 4242);
    const double r = 0.5;
    CircleFunction pg = poisson_extend(g, r);
    for (double theta : {0.1, 2.0, 5.5}) {
        double integral = periodic_integral(
            [&](double eta) {
                double dx = r * std::cos(theta) - std::cos(eta);
                double dy = r * std::sin(theta) - std::sin(eta);
                return (1.0 - r * r) / (2.0 * kPi * (dx * dx + dy * dy)) * g(eta);
            },
            4096);
        CHECK(integral == doctest::Approx(pg(theta)).epsilon(1e-8));
    }

    // semigroup and contraction properties
    CircleFunction ab = poisson_extend(poisson_extend(g, 0.8), 0.55);
    CircleFunction c = poisson_extend(g, 0.44);
    for (int k = 0; k <= g.degree(); ++k) {
        CHECK(ab.cos_coeff(k) == doctest::Approx(c.cos_coeff(k)).epsilon(1e-14));
        CHECK(ab.sin_coeff(k) == doctest::Approx(c.sin_coeff(k)).epsilon(1e-14));
    }
    for (double rr : {0.2, 0.9, 0.999}) CHECK(poisson_extend(g, rr).l2_norm() <= g.l2_norm());
}

TEST_CASE("parseval consistency between coefficients and samples") {
    CircleFunction g = CircleFunction::random(16, 99);
    double coeff_norm = g.l2_norm();
    double sample_norm = g.lq_norm(2.0);
    CHECK(sample_norm == doctest::Approx(coeff_norm).epsilon(1e-10));
}

TEST_CASE("radial extension is r-independent and isometric") {
    CircleFunction g = CircleFunction::harmonic(1, 1.0);
    RadialFourierField r_ext = radial_extend(g);
    CHECK(r_ext.eval(0.3, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r_ext.eval(0.9, 0.0) == doctest::Approx(r_ext.eval(0.1, 0.0)).epsilon(1e-15));

    RadialFourierField const_ext = radial_extend(CircleFunction::constant(1.0));
    CHECK(const_ext.eval(0.5, 2.2) == 1.0);

    ConcentratingWeight w = unit_weight(0.5);
    double lhs = bulk_lq_norm(r_ext, w, 2.0);
    double rhs = g.lq_norm(2.0, &w.alpha);
    CHECK(std::abs(lhs - rhs) <= 1e-10);
}

TEST_CASE("slobodeckij norm: constants, homogeneity, multiplier oracle") {
    double c = slobodeckij_norm(CircleFunction::constant(2.0), 0.5, 2.0);
    CHECK(c == doctest::Approx(2.0 * std::sqrt(2.0 * kPi)).epsilon(1e-12));

    CircleFunction g = CircleFunction::random(6, 7);
    double n1 = slobodeckij_norm(g, 0.4, 2.0);
    double n2 = slobodeckij_norm(g * 2.0, 0.4, 2.0);
    CHECK(n2 == doctest::Approx(2.0 * n1).epsilon(1e-12));
    double n3 = slobodeckij_norm(g * -3.0, 0.4, 1.5);
    CHECK(n3 == doctest::Approx(3.0 * slobodeckij_norm(g, 0.4, 1.5)).epsilon(1e-12));

    // Fourier multiplier oracle at q=2 (same tau_min cutoff on both sides)
    const double s = 0.5;
    double semi = slobodeckij_seminorm_pow(g, s, 2.0);
    double oracle = 0.0;
    for (int k = 1; k <= g.degree(); ++k) {
        double wk = 2.0 * adaptive_integral(
                              [&](double tau) {
                                  return (2.0 - 2.0 * std::cos(k * tau)) *
                                         std::pow(2.0 * std::sin(0.5 * tau), -1.0 - 2.0 * s);
                              },
                              1e-6, kPi, 1e-12, 1e-12);
        oracle +=
            (g.cos_coeff(k) * g.cos_coeff(k) + g.sin_coeff(k) * g.sin_coeff(k)) * kPi * wk;
    }
    CHECK(std::abs(semi - oracle) / oracle <= 1e-4);
}

TEST_CASE("poisson vs radial gap") {
    // constants have zero gap
    CHECK(poisson_radial_gap(CircleFunction::constant(1.0), unit_weight(0.3), 2.0) <= 1e-13);

    // closed form at a=1, q=2, alpha=1: sqrt(pi/6)
    double gap = poisson_radial_gap(CircleFunction::harmonic(1, 1.0), unit_weight(1.0), 2.0);
    CHECK(gap == doctest::Approx(std::sqrt(kPi / 6.0)).epsilon(1e-9));

    // closed form for general a: gap^2 = 2 pi / ((b+1)(b+2)), b = 2/a
    for (double a : {0.4, 0.1, 0.0125}) {
        double b = 2.0 / a;
        double expect = std::sqrt(2.0 * kPi / ((b + 1.0) * (b + 2.0)));
        CHECK(poisson_radial_gap(CircleFunction::harmonic(1, 1.0), unit_weight(a), 2.0) ==
              doctest::Approx(expect).epsilon(1e-8));
    }

    // nonincreasing in a and log-log slope at least 0.9 across the grid
    std::vector<double> gaps, grid = concentration_grid();
    for (double a : grid)
        gaps.push_back(poisson_radial_gap(CircleFunction::harmonic(1, 1.0), unit_weight(a), 2.0));
    for (std::size_t i = 1; i < gaps.size(); ++i) CHECK(gaps[i] <= gaps[i - 1]);
    double slope = std::log(gaps.back() / gaps.front()) / std::log(grid.back() / grid.front());
    CHECK(slope >= 0.9);
}

TEST_CASE("radial trace gap") {
    ConcentratingWeight w = unit_weight(0.5);
    CircleFunction g = CircleFunction::harmonic(1, 1.0);

    // u = P[g] exactly: definitional equality with the poisson gap
    double via_field = radial_trace_gap(poisson_field(g), w, 2.0);
    CHECK(via_field == doctest::Approx(poisson_radial_gap(g, w, 2.0)).epsilon(1e-10));

    // harmonic r cos theta: gap over gradient norm decays along the grid with
    // fitted slope at least 0.45 (ball-side estimate, delta_{2,2} = 1/2)
    std::vector<double> grid = concentration_grid();
    double grad_norm = std::sqrt(kPi);  // |grad(r cos)| = 1 on the disk
    std::vector<double> ratio;
    for (double a : grid)
        ratio.push_back(radial_trace_gap(poisson_field(g), unit_weight(a), 2.0) / grad_norm);
    double slope = std::log(ratio.back() / ratio.front()) / std::log(grid.back() / grid.front());
    CHECK(slope >= 0.45);

    // zero-trace probe u = (1-r)cos theta: gap equals the L^q(mu_a) norm and
    // the ratio to the gradient norm is dominated by a^delta
    RadialFourierField layer;
    layer.modes.push_back({1, false, [](double r) { return 1.0 - r; }});
    for (double a : {0.4, 0.05}) {
        ConcentratingWeight wa = unit_weight(a);
        double gap = radial_trace_gap(layer, wa, 2.0);
        double expect = std::sqrt(kPi * beta_moment(wa, 1.0, 2.0));
        CHECK(gap == doctest::Approx(expect).epsilon(1e-8));
    }

    // discontinuous radial profile has no trace
    RadialFourierField bad;
    bad.modes.push_back({1, false, [](double r) { return r < 1.0 ? 0.0 : 5.0; }});
    CHECK_THROWS_AS(bad.trace(), std::invalid_argument);
}
