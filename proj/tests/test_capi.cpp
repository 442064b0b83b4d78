// Exercises the shared-library C surface: handles, status codes, error
// messages, and the experiment drivers.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstring>
#include <string>

#include "doctest.h"
#include "steklimit.h"

TEST_CASE("version and error message plumbing") {
    CHECK(std::string(stek_version()).find("steklimit") != std::string::npos);
    stek_weight* w = nullptr;
    CHECK(stek_weight_create("constant:1", 2, 2.5, &w) == STEK_ERR_DOMAIN);
    CHECK(std::string(stek_last_error()).find("(0,1]") != std::string::npos);
    CHECK(stek_weight_create("gibberish", 2, 0.5, &w) == STEK_ERR_INVALID_ARGUMENT);
    CHECK(stek_weight_create(nullptr, 2, 0.5, &w) == STEK_ERR_INVALID_ARGUMENT);
}

TEST_CASE("weight handle operations") {
    stek_weight* w = nullptr;
    REQUIRE(stek_weight_create("constant:1", 2, 0.5, &w) == STEK_OK);
    double v = 0.0;
    CHECK(stek_weight_rho(w, 0.5, &v) == STEK_OK);
    CHECK(v == doctest::Approx(1.0));
    CHECK(stek_weight_rho(w, 2.0, &v) == STEK_ERR_DOMAIN);
    CHECK(stek_weight_radial_mass(w, &v) == STEK_OK);
    CHECK(v == 1.0);
    CHECK(stek_weight_total_mass(w, &v) == STEK_OK);
    CHECK(v == doctest::Approx(2.0 * 3.14159265358979).epsilon(1e-10));
    double sup = 0, arg = 0;
    CHECK(stek_weight_layer_sup(w, 2.0, &sup, &arg) == STEK_OK);
    CHECK(arg == doctest::Approx(0.5));
    CHECK(stek_weight_beta_moment(w, 0.5, 2.0, &v) == STEK_OK);
    CHECK(v == doctest::Approx(0.5 / 2.5).epsilon(1e-12));  // a/(n+a)
    stek_weight_destroy(w);

    double d = 0.0;
    CHECK(stek_delta_exponent(2.0, 2.0, 3, &d) == STEK_OK);
    CHECK(d == doctest::Approx(0.5));
    CHECK(stek_delta_exponent(2.0, 2.0, 2, &d) == STEK_ERR_DOMAIN);
}

TEST_CASE("map handle operations") {
    stek_map* m = nullptr;
    REQUIRE(stek_map_create("conformal:0.25", &m) == STEK_OK);
    double u, v, x, y, det;
    CHECK(stek_map_forward(m, 1.0, 0.0, &u, &v) == STEK_OK);
    CHECK(u == doctest::Approx(1.25).epsilon(1e-14));
    CHECK(stek_map_inverse(m, u, v, &x, &y) == STEK_OK);
    CHECK(x == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(stek_map_jacobian(m, 0.0, 0.0, &det) == STEK_OK);
    CHECK(det == doctest::Approx(1.0));
    double jd;
    CHECK(stek_map_boundary_derivative(m, 0.0, &jd) == STEK_OK);
    CHECK(jd == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    stek_map_destroy(m);
    CHECK(stek_map_create("radial-power:7", &m) == STEK_ERR_INVALID_ARGUMENT);
}

TEST_CASE("mesh handle operations") {
    stek_mesh* mesh = nullptr;
    REQUIRE(stek_mesh_build(0.1, 0.05, &mesh) == STEK_OK);
    int nv = 0, nt = 0, nb = 0;
    CHECK(stek_mesh_counts(mesh, &nv, &nt, &nb) == STEK_OK);
    CHECK(nv > 100);
    CHECK(nt > nv);
    CHECK(nb > 10);
    CHECK(stek_mesh_write(mesh, "/tmp/steklimit_capi_mesh.txt") == STEK_OK);
    CHECK(stek_mesh_write(mesh, "/nonexistent-dir/mesh.txt") == STEK_ERR_IO);
    stek_mesh_destroy(mesh);
    CHECK(stek_mesh_build(0.5, 0.1, &mesh) == STEK_ERR_INVALID_ARGUMENT);
}

TEST_CASE("single solve through the C surface") {
    const char* cfg = R"({"n":2,"mesh_h":0.08,"outside_hypotheses":true})";
    stek_solution* sol = nullptr;
    REQUIRE(stek_solve(cfg, "steklov", 1.0, &sol) == STEK_OK);
    double lam = 0, c = 0, res = 0;
    long iters = 0;
    int mult = 0;
    CHECK(stek_solution_lambda(sol, &lam) == STEK_OK);
    CHECK(lam == doctest::Approx(1.0).epsilon(0.02));
    CHECK(stek_solution_sharp_constant(sol, &c) == STEK_OK);
    CHECK(c == doctest::Approx(std::pow(lam, -0.5)).epsilon(1e-12));
    CHECK(stek_solution_residual(sol, &res) == STEK_OK);
    CHECK(res <= 1e-8);
    CHECK(stek_solution_iterations(sol, &iters) == STEK_OK);
    CHECK(stek_solution_multiplicity(sol, &mult) == STEK_OK);
    CHECK(mult == 2);
    char* json = nullptr;
    CHECK(stek_solution_json(sol, &json) == STEK_OK);
    CHECK(std::string(json).find("lambda") != std::string::npos);
    stek_string_free(json);
    stek_solution_destroy(sol);

    CHECK(stek_solve(cfg, "dirichlet", 1.0, &sol) == STEK_ERR_INVALID_ARGUMENT);
    CHECK(stek_solve("{\"bogus\":1}", "steklov", 1.0, &sol) == STEK_ERR_INVALID_ARGUMENT);
    CHECK(stek_solve("not json", "steklov", 1.0, &sol) == STEK_ERR_INVALID_ARGUMENT);
}

TEST_CASE("sweep driver through the C surface") {
    const char* cfg = R"({"n":3,"a_count":4,"oracle_cells":200})";
    char* summary = nullptr;
    int ok = 0;
    REQUIRE(stek_run_sweep(cfg, &summary, &ok) == STEK_OK);
    CHECK(ok == 1);
    std::string s = summary;
    CHECK(s.find("lambda_st") != std::string::npos);
    CHECK(s.find("monotone_decreasing") != std::string::npos);
    stek_string_free(summary);

    char* osum = nullptr;
    REQUIRE(stek_run_oracle(cfg, &osum) == STEK_OK);
    CHECK(std::string(osum).find("steklov_exact") != std::string::npos);
    stek_string_free(osum);

    char* msum = nullptr;
    int mok = 0;
    REQUIRE(stek_run_minimizer_sweep(R"({"n":3,"a_count":5,"oracle_cells":200})", &msum, &mok) ==
            STEK_OK);
    CHECK(mok == 1);
    stek_string_free(msum);
}
