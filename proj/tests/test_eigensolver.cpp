#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "steklimit/eigensolver.hpp"
#include "support/oracles.hpp"

using namespace stek;

namespace {
constexpr double kPi = std::numbers::pi;

std::shared_ptr<const DiskMesh> make_mesh(double h, double layer) {
    return std::make_shared<DiskMesh>(build_disk_mesh(h, layer));
}

AssembledForms disk_forms(double h, double bulk_const, double p = 2.0) {
    auto mesh = make_mesh(h, h);
    return assemble(
        mesh, [bulk_const](Vec2) { return bulk_const; }, [](double) { return 1.0; },
        TransferMap::identity(2), p);
}
}  // namespace

TEST_CASE("q-center: weighted mean, symmetry, golden-section oracle") {
    AssembledForms forms = disk_forms(0.1, 1.0);
    const auto& mesh = forms.mesh;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::VectorXd v(mesh->vertex_count());
    for (int i = 0; i < v.size(); ++i) v[i] = dist(rng) + 0.3;

    // q=2 is the weighted mean
    double c2 = forms.bulk_norm.qcenter(v, 2.0);
    double mean = 0.0;
    {
        Eigen::VectorXd ones = Eigen::VectorXd::Ones(v.size());
        mean = ones.dot(forms.bulk_mass * v) / ones.dot(forms.bulk_mass * ones);
    }
    CHECK(c2 == doctest::Approx(mean).epsilon(1e-12));

    // odd field under rotation by pi with symmetric weight: center 0
    DiscreteField odd = interpolate(mesh, [](Vec2 x) { return x.x(); });
    CHECK(std::abs(q_center(odd, forms.bulk_norm, 2.0)) <= 1e-12);
    CHECK(std::abs(q_center(odd, forms.bulk_norm, 3.0)) <= 1e-10);

    // q=3 against a golden-section search on the strictly convex objective
    Eigen::VectorXd small = 0.1 * v;
    double c3 = forms.bulk_norm.qcenter(small, 3.0);
    double oracle = oracles::golden_section_min(
        [&](double c) { return forms.bulk_norm.norm_q_pow(small, c, 3.0); }, small.minCoeff(),
        small.maxCoeff());
    CHECK(c3 == doctest::Approx(oracle).epsilon(1e-8));

    // the center condition holds at the root
    CHECK(std::abs(forms.bulk_norm.signed_moment(small, c3, 3.0)) <=
          1e-10 * forms.bulk_norm.mass());
    CHECK_THROWS_AS(forms.bulk_norm.qcenter(v, 1.0), std::domain_error);
}

TEST_CASE("quotient: value, invariance, constant rejection") {
    AssembledForms forms = disk_forms(0.05, 1.0);
    DiscreteField x1 = interpolate(forms.mesh, [](Vec2 x) { return x.x(); });

    // harmonic r cos on the Steklov quotient: continuum value 1
    double q_st = quotient(forms, ProblemKind::Steklov, x1, 2.0, 2.0);
    CHECK(q_st == doctest::Approx(1.0).epsilon(0.01));

    // scale and shift invariance at the 1e-12 level
    DiscreteField scaled(forms.mesh, (3.0 * x1.values).eval());
    DiscreteField shifted(forms.mesh, (x1.values.array() + 5.0).matrix().eval());
    CHECK(quotient(forms, ProblemKind::Steklov, scaled, 2.0, 2.0) ==
          doctest::Approx(q_st).epsilon(1e-12));
    CHECK(quotient(forms, ProblemKind::Steklov, shifted, 2.0, 2.0) ==
          doctest::Approx(q_st).epsilon(1e-12));
    double q_n = quotient(forms, ProblemKind::Neumann, x1, 1.5, 2.0);
    DiscreteField both(forms.mesh, (-2.0 * x1.values).array().matrix().eval());
    CHECK(quotient(forms, ProblemKind::Neumann, both, 1.5, 2.0) ==
          doctest::Approx(q_n).epsilon(1e-12));

    DiscreteField c = interpolate(forms.mesh, [](Vec2) { return 4.0; });
    CHECK_THROWS_AS(quotient(forms, ProblemKind::Neumann, c, 2.0, 2.0), std::invalid_argument);
}

TEST_CASE("linear Steklov on the disk: unit eigenvalue, degenerate pair, ordering") {
    AssembledForms forms = disk_forms(0.05, 1.0);
    EigenResult res = solve_linear(forms, ProblemKind::Steklov);
    CHECK(res.lambda == doctest::Approx(1.0).epsilon(0.01));
    CHECK(res.degenerate_pair.has_value());
    REQUIRE(res.spectrum_head.size() >= 3);
    CHECK(res.spectrum_head[0] == doctest::Approx(1.0).epsilon(0.02));
    CHECK(res.spectrum_head[1] == doctest::Approx(1.0).epsilon(0.02));
    CHECK(res.spectrum_head[2] == doctest::Approx(2.0).epsilon(0.02));
    CHECK(res.weak_residual <= 1e-8);
    CHECK(res.sharp_constant == doctest::Approx(std::pow(res.lambda, -0.5)).epsilon(1e-12));
    CHECK(res.normalization == doctest::Approx(1.0).epsilon(1e-10));
    // q-center condition of the returned minimizer
    CHECK(std::abs(forms.boundary_norm.signed_moment(res.minimizer.values, 0.0, 2.0)) <=
          1e-8 * forms.boundary_norm.mass());
}

TEST_CASE("linear Neumann on the disk with weight 2") {
    AssembledForms forms = disk_forms(0.05, 2.0);
    EigenResult res = solve_linear(forms, ProblemKind::Neumann);
    const double target = std::pow(oracles::bessel_j1_prime_root(), 2) / 2.0;
    CHECK(res.lambda == doctest::Approx(target).epsilon(0.01));
    CHECK(res.lambda > 0.0);
    CHECK(res.weak_residual <= 1e-8);
    CHECK(res.degenerate_pair.has_value());
    // q-center of the minimizer vanishes
    CHECK(std::abs(forms.bulk_norm.signed_moment(res.minimizer.values, 0.0, 2.0)) <=
          1e-8 * forms.bulk_norm.mass());

    // variational lower bound: no random field beats the first eigenvalue
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int trial = 0; trial < 25; ++trial) {
        Eigen::VectorXd v(forms.mesh->vertex_count());
        for (int i = 0; i < v.size(); ++i) v[i] = dist(rng);
        DiscreteField f(forms.mesh, v);
        CHECK(quotient(forms, ProblemKind::Neumann, f, 2.0, 2.0) >= res.lambda * (1 - 1e-9));
    }
}

TEST_CASE("nonlinear path reproduces the linear path at p=q=2") {
    AssembledForms forms = disk_forms(0.05, 1.0);
    EigenResult lin = solve_linear(forms, ProblemKind::Steklov);
    SolveOptions opts;
    opts.restarts = 2;
    EigenResult non = minimize_quotient(forms, ProblemKind::Steklov, 2.0, 2.0, opts);
    CHECK(non.lambda == doctest::Approx(lin.lambda).epsilon(0.005));
    CHECK(non.weak_residual <= 1e-6);

    // quotient trace is nonincreasing across accepted steps
    for (std::size_t i = 1; i < non.quotient_trace.size(); ++i)
        CHECK(non.quotient_trace[i] <= non.quotient_trace[i - 1] * (1 + 1e-12));

    AssembledForms nf = disk_forms(0.05, 2.0);
    EigenResult lin_n = solve_linear(nf, ProblemKind::Neumann);
    EigenResult non_n = minimize_quotient(nf, ProblemKind::Neumann, 2.0, 2.0, opts);
    CHECK(non_n.lambda == doctest::Approx(lin_n.lambda).epsilon(0.005));
}

TEST_CASE("nonlinear solve at p=1.5 is stable across restarts") {
    AssembledForms forms = disk_forms(0.08, 1.0, 1.5);
    SolveOptions opts;
    EigenResult best = minimize_quotient(forms, ProblemKind::Steklov, 1.5, 2.0, opts);
    CHECK(best.lambda > 0.0);
    CHECK(best.weak_residual <= 1e-6);
    CHECK(best.sharp_constant == doctest::Approx(std::pow(best.lambda, -1.0 / 1.5)).epsilon(1e-12));

    // single-seed runs from different starts land on the same value to 0.5%
    SolveOptions one;
    one.restarts = 1;
    EigenResult r1 = minimize_quotient(forms, ProblemKind::Steklov, 1.5, 2.0, one);
    one.seed = 777;
    one.restarts = 2;
    EigenResult r2 = minimize_quotient(forms, ProblemKind::Steklov, 1.5, 2.0, one);
    CHECK(r1.lambda == doctest::Approx(r2.lambda).epsilon(0.005));
    CHECK(r1.lambda == doctest::Approx(best.lambda).epsilon(0.005));
}

TEST_CASE("quotient gradient matches finite differences") {
    for (auto [p, q] : std::vector<std::pair<double, double>>{{2.0, 2.0}, {1.5, 2.0}, {2.5, 2.5}}) {
        AssembledForms forms = disk_forms(0.15, 1.0, p);
        const int nv = forms.mesh->vertex_count();
        std::mt19937_64 rng(41);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        Eigen::VectorXd u(nv);
        for (int i = 0; i < nv; ++i) u[i] = dist(rng);

        auto quotient_at = [&](const Eigen::VectorXd& v) {
            return quotient(forms, ProblemKind::Neumann, DiscreteField(forms.mesh, v), p, q);
        };
        // analytic gradient of E/N^{p/q}
        double c = forms.bulk_norm.qcenter(u, q);
        double E = forms.energy.value(u, p);
        double N = forms.bulk_norm.norm_q_pow(u, c, q);
        Eigen::VectorXd grad = Eigen::VectorXd::Zero(nv);
        forms.energy.add_value_gradient(u, p, std::pow(N, -p / q), grad);
        forms.bulk_norm.add_norm_q_gradient(u, c, q, -(p / q) * E * std::pow(N, -p / q - 1.0),
                                            grad);
        const double step = 1e-6;
        for (int i = 0; i < 10; ++i) {
            Eigen::VectorXd up = u, um = u;
            up[i] += step;
            um[i] -= step;
            double fd = (quotient_at(up) - quotient_at(um)) / (2 * step);
            CHECK(grad[i] == doctest::Approx(fd).epsilon(2e-5));
        }
    }
}

TEST_CASE("solver failure paths") {
    AssembledForms forms = disk_forms(0.1, 1.0);
    SolveOptions opts;
    opts.max_iterations = 3;  // too few to converge from any seed
    opts.stall_steps = 1000;
    opts.grad_tol = 0.0;
    opts.polish_grad_tol = 0.0;
    CHECK_THROWS_AS(minimize_quotient(forms, ProblemKind::Steklov, 1.5, 2.0, opts), SolverError);
}
