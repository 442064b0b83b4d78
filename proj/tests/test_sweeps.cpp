#include <cmath>

#include "doctest.h"
#include "steklimit/radial_spectral.hpp"
#include "steklimit/sweeps.hpp"

using namespace stek;

TEST_CASE("config json round trip and strictness") {
    SweepConfig cfg;
    cfg.n = 3;
    cfg.a_count = 5;
    cfg.out = "x";
    nlohmann::json j = cfg.to_json();
    SweepConfig back = SweepConfig::from_json(j);
    CHECK(back.n == 3);
    CHECK(back.a_count == 5);
    CHECK(back.out == "x");
    CHECK(back.to_json() == j);

    nlohmann::json bad = j;
    bad["mystery"] = 1;
    CHECK_THROWS_WITH_AS(SweepConfig::from_json(bad), doctest::Contains("unknown key"),
                         std::invalid_argument);
    nlohmann::json bad_solver = j;
    bad_solver["solver"]["warp"] = 9;
    CHECK_THROWS_AS(SweepConfig::from_json(bad_solver), std::invalid_argument);

    // exponents outside the admissible range need the acknowledgment flag
    nlohmann::json sanity = nlohmann::json::object();
    sanity["n"] = 2;
    CHECK_THROWS_AS(SweepConfig::from_json(sanity), std::domain_error);
    sanity["outside_hypotheses"] = true;
    CHECK(SweepConfig::from_json(sanity).linear_path());

    // in-hypothesis nonlinear config needs no flag
    nlohmann::json ok = nlohmann::json::object();
    ok["p"] = 1.5;
    ok["q"] = 2.0;
    CHECK(SweepConfig::from_json(ok).delta() == doctest::Approx(1.0 / 6).epsilon(1e-12));

    // n=3 demands the radial setup
    nlohmann::json n3 = nlohmann::json::object();
    n3["n"] = 3;
    n3["map"] = "radial-power:0.5";
    CHECK_THROWS_AS(SweepConfig::from_json(n3), std::invalid_argument);
}

TEST_CASE("radial sweep: monotone errors, slope, fit guard") {
    SweepConfig cfg;
    cfg.n = 3;
    cfg.oracle_cells = 300;
    SweepReport rep = run_sweep(cfg);
    CHECK(rep.ok);
    CHECK(rep.lambda_st == 1.0);
    CHECK(rep.monotone_decreasing);
    CHECK(rep.fit_attempted);
    CHECK(rep.s_fit >= 0.45);
    CHECK(rep.fit_residual <= 0.2);
    CHECK(rep.rate_conclusive);

    // a 3-point grid refuses the slope fit but still reports errors
    SweepConfig short_cfg = cfg;
    short_cfg.a_count = 3;
    SweepReport short_rep = run_sweep(short_cfg);
    CHECK(short_rep.ok);
    CHECK_FALSE(short_rep.fit_attempted);
    CHECK_FALSE(short_rep.rate_conclusive);
    for (const auto& pt : short_rep.points) CHECK(pt.error > 0.0);
}

TEST_CASE("sweep determinism: identical config gives identical bytes") {
    SweepConfig cfg;
    cfg.n = 3;
    cfg.a_count = 4;
    cfg.oracle_cells = 200;
    SweepReport r1 = run_sweep(cfg);
    SweepReport r2 = run_sweep(cfg);
    CHECK(r1.csv() == r2.csv());
    CHECK(r1.to_json().dump() == r2.to_json().dump());

    // worker count does not change the numbers
    SweepConfig par = cfg;
    par.workers = 4;
    SweepReport r3 = run_sweep(par);
    CHECK(r3.csv() == r1.csv());
}

TEST_CASE("fem sweep cross-checks the radial oracle per point") {
    SweepConfig cfg;
    cfg.n = 2;
    cfg.outside_hypotheses = true;
    cfg.a_count = 4;
    cfg.mesh_h = 0.05;
    cfg.workers = 4;
    cfg.refine_check = false;
    SweepReport rep = run_sweep(cfg);
    CHECK(rep.ok);
    CHECK(rep.lambda_st == doctest::Approx(1.0).epsilon(0.01));
    BoundaryWeight alpha = BoundaryWeight::constant(1.0, 2);
    for (const auto& pt : rep.points) {
        double oracle = mode_neumann(2, 1, ConcentratingWeight(alpha, pt.a, 2)).value;
        CHECK(pt.lambda_n == doctest::Approx(oracle).epsilon(0.005));
    }
}

TEST_CASE("minimizer sweep distances decrease") {
    SweepConfig cfg;
    cfg.n = 3;
    cfg.a_count = 6;
    cfg.oracle_cells = 300;
    MinimizerReport rep = run_minimizer_sweep(cfg);
    CHECK(rep.ok);
    CHECK(rep.decreasing);
    CHECK(rep.last_over_first < 0.5);

    // identical runs are bitwise identical
    MinimizerReport rep2 = run_minimizer_sweep(cfg);
    CHECK(rep.csv() == rep2.csv());

    SweepConfig bad = cfg;
    bad.n = 2;
    bad.p = 1.5;
    bad.q = 2.0;
    CHECK_THROWS_AS(run_minimizer_sweep(bad), std::invalid_argument);
}

TEST_CASE("quotient comparison: constant field is exact, columns bounded") {
    SweepConfig cfg;
    cfg.n = 2;
    cfg.outside_hypotheses = true;
    cfg.a_count = 5;
    cfg.mesh_h = 0.05;
    cfg.workers = 4;
    QuotientReport rep = run_quotient_comparison(cfg);
    CHECK(rep.ok);
    CHECK(rep.rate_exponent == doctest::Approx(0.45).epsilon(1e-12));
    for (const auto& row : rep.rows) {
        if (row.field == "constant") {
            CHECK(row.gap <= 1e-12);
            CHECK(row.normalized == 0.0);
        }
    }
    for (bool b : rep.bounded) CHECK(b);

    // harmonic extension of cos(2 theta): gap decays with slope >= 0.45
    std::vector<double> gaps, as;
    for (const auto& row : rep.rows) {
        if (row.field == "harmonic-cos2") {
            gaps.push_back(row.gap);
            as.push_back(row.a);
        }
    }
    REQUIRE(gaps.size() >= 2);
    double slope = std::log(gaps.back() / gaps.front()) / std::log(as.back() / as.front());
    CHECK(slope >= 0.45);
}

TEST_CASE("lemma check suite passes end to end") {
    LemmaReport rep = run_lemma_checks();
    for (const auto& c : rep.checks) {
        CAPTURE(c.name);
        CHECK(c.pass);
    }
    CHECK(rep.all_passed);
    CHECK(rep.checks.size() >= 30);
}

TEST_CASE("single solves mirror the drivers") {
    SweepConfig cfg;
    cfg.n = 2;
    cfg.outside_hypotheses = true;
    cfg.mesh_h = 0.05;
    SingleSolve st = solve_single(cfg, ProblemKind::Steklov, 1.0);
    CHECK(st.lambda == doctest::Approx(1.0).epsilon(0.01));
    CHECK(st.multiplicity == 2);
    SingleSolve ne = solve_single(cfg, ProblemKind::Neumann, 1.0);
    CHECK(ne.lambda == doctest::Approx(1.695).epsilon(0.02));

    SweepConfig r3;
    r3.n = 3;
    SingleSolve o3 = solve_single(r3, ProblemKind::Steklov, 1.0);
    CHECK(o3.lambda == 1.0);
}
