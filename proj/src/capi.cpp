#include "steklimit.h"

#include <cstring>
#include <memory>
#include <string>

#include "steklimit/sweeps.hpp"

struct stek_weight {
    stek::ConcentratingWeight w;
};
struct stek_map {
    stek::TransferMap m;
};
struct stek_mesh {
    stek::DiskMesh m;
};
struct stek_solution {
    stek::SingleSolve s;
};

namespace {

thread_local std::string g_last_error;

stek_status fail(stek_status code, const char* what) {
    g_last_error = what != nullptr ? what : "unknown error";
    return code;
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

// Maps the C++ error taxonomy onto status codes at the library boundary.
template <typename Fn>
stek_status guard(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return STEK_OK;
    } catch (const stek::SolverError& e) {
        return fail(STEK_ERR_SOLVER, e.what());
    } catch (const std::domain_error& e) {
        return fail(STEK_ERR_DOMAIN, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(STEK_ERR_INVALID_ARGUMENT, e.what());
    } catch (const nlohmann::json::exception& e) {
        return fail(STEK_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::ios_base::failure& e) {
        return fail(STEK_ERR_IO, e.what());
    } catch (const std::exception& e) {
        std::string msg = e.what();
        if (msg.find("cannot open") != std::string::npos ||
            msg.find("cannot write") != std::string::npos)
            return fail(STEK_ERR_IO, e.what());
        return fail(STEK_ERR_INTERNAL, e.what());
    }
}

stek_status require(bool ok, const char* what) {
    return ok ? STEK_OK : fail(STEK_ERR_INVALID_ARGUMENT, what);
}

stek::SweepConfig parse_config(const char* config_json) {
    return stek::SweepConfig::from_json(nlohmann::json::parse(config_json));
}

}  // namespace

extern "C" {

const char* stek_version(void) { return stek::version_string(); }

const char* stek_last_error(void) { return g_last_error.c_str(); }

void stek_string_free(char* s) { delete[] s; }

stek_status stek_weight_create(const char* alpha_spec, int n, double a, stek_weight** out) {
    if (require(alpha_spec && out, "null argument") != STEK_OK) return STEK_ERR_INVALID_ARGUMENT;
    return guard([&] {
        *out = new stek_weight{
            stek::ConcentratingWeight(stek::BoundaryWeight::parse(alpha_spec, n), a, n)};
    });
}

void stek_weight_destroy(stek_weight* w) { delete w; }

stek_status stek_weight_rho(const stek_weight* w, double r, double* out) {
    if (require(w && out, "null argument") != STEK_OK) return STEK_ERR_INVALID_ARGUMENT;
    return guard([&] { *out = w->w.rho(r); });
}

stek_status stek_weight_radial_mass(const stek_weight* w, double* out) {
    if (require(w && out, "null argument") != STEK_OK) return STEK_ERR_INVALID_ARGUMENT;
    return guard([&] { *out = w->w.radial_mass(); });
}

stek_status stek_weight_total_mass(const stek_weight* w, double* out) {
    if (require(w && out, "null argument") != STEK_OK) return STEK_ERR_INVALID_ARGUMENT;
    return guard([&] { *out = w->w.total_mass(); });
}

stek_status stek_weight_layer_sup(const stek_weight* w, double m, double* sup, double* argmax_r) {
    if (require(w && sup && argmax_r, "null argument") != STEK_OK)
        return STEK_ERR_INVALID_ARGUMENT;
    return guard([&] {
        stek::LayerSup ls = stek::layer_sup(w->w, m);
        *sup = ls.value;
        *argmax_r = ls.argmax_r;
    });
}

stek_status stek_weight_beta_moment(const stek_weight* w, double s, double q, double* out) {
    if (require(w && out, "null argument") != STEK_OK) return STEK_ERR_INVALID_ARGUMENT;
    return guard([&] { *out = stek::beta_moment(w->w, s, q); });
}

stek_status stek_delta_exponent(double p, double q, int n, double* out) {
    if (require(out != nullptr, "null argument") != STEK_OK) return STEK_ERR_INVALID_ARGUMENT;
    return guard([&] { *out = stek::delta_exponent(stek::Exponents::checked(p, q, n)); });
}

stek_status stek_map_create(const char* map_spec, stek_map** out) {
    if (require(map_spec && out, "null argument") != STEK_OK) return STEK_ERR_INVALID_ARGUMENT;
    return guard([&] { *out = new stek_map{stek::TransferMap::parse(map_spec, 2)}; });
}

void stek_map_destroy(stek_map* m) { delete m; }

stek_status stek_map_forward(const stek_map* m, double x, double y, double* u, double* v) {
    if (require(m && u && v, "null argument") != STEK_OK) return STEK_ERR_INVALID_ARGUMENT;
    return guard([&] {
        stek::Vec2 p = m->m.forward(stek::Vec2(x, y));
        *u = p.x();
        *v = p.y();
    });
}

stek_status stek_map_inverse(const stek_map* m, double u, double v, double* x, double* y) {
    if (require(m && x && y, "null argument") != STEK_OK) return STEK_ERR_INVALID_ARGUMENT;
    return guard([&] {
        stek::Vec2 p = m->m.inverse(stek::Vec2(u, v));
        *x = p.x();
        *y = p.y();
    });
}

stek_status stek_map_jacobian(const stek_map* m, double x, double y, double* det) {
    if (require(m && det, "null argument") != STEK_OK) return STEK_ERR_INVALID_ARGUMENT;
    return guard([&] { *det = m->m.jacobian_det(stek::Vec2(x, y)); });
}

stek_status stek_map_boundary_derivative(const stek_map* m, double theta, double* out) {
    if (require(m && out, "null argument") != STEK_OK) return STEK_ERR_INVALID_ARGUMENT;
    return guard([&] { *out = m->m.boundary_volume_derivative(theta); });
}

stek_status stek_mesh_build(double h, double boundary_layer, stek_mesh** out) {
    if (require(out != nullptr, "null argument") != STEK_OK) return STEK_ERR_INVALID_ARGUMENT;
    return guard([&] { *out = new stek_mesh{stek::build_disk_mesh(h, boundary_layer)}; });
}

void stek_mesh_destroy(stek_mesh* m) { delete m; }

stek_status stek_mesh_counts(const stek_mesh* m, int* vertices, int* triangles,
                             int* boundary_edges) {
    if (require(m && vertices && triangles && boundary_edges, "null argument") != STEK_OK)
        return STEK_ERR_INVALID_ARGUMENT;
    *vertices = m->m.vertex_count();
    *triangles = m->m.triangle_count();
    *boundary_edges = m->m.boundary_count();
    return STEK_OK;
}

stek_status stek_mesh_write(const stek_mesh* m, const char* path) {
    if (require(m && path, "null argument") != STEK_OK) return STEK_ERR_INVALID_ARGUMENT;
    return guard([&] { stek::write_mesh_file(m->m, path); });
}

stek_status stek_solve(const char* config_json, const char* problem, double a,
                       stek_solution** out) {
    if (require(config_json && problem && out, "null argument") != STEK_OK)
        return STEK_ERR_INVALID_ARGUMENT;
    return guard([&] {
        std::string which = problem;
        if (which != "steklov" && which != "neumann")
            throw std::invalid_argument("problem must be 'steklov' or 'neumann'");
        stek::SweepConfig cfg = parse_config(config_json);
        stek::SingleSolve s = stek::solve_single(
            cfg, which == "steklov" ? stek::ProblemKind::Steklov : stek::ProblemKind::Neumann, a);
        *out = new stek_solution{std::move(s)};
    });
}

void stek_solution_destroy(stek_solution* s) { delete s; }

stek_status stek_solution_lambda(const stek_solution* s, double* out) {
    if (require(s && out, "null argument") != STEK_OK) return STEK_ERR_INVALID_ARGUMENT;
    *out = s->s.lambda;
    return STEK_OK;
}

stek_status stek_solution_sharp_constant(const stek_solution* s, double* out) {
    if (require(s && out, "null argument") != STEK_OK) return STEK_ERR_INVALID_ARGUMENT;
    *out = s->s.sharp_constant;
    return STEK_OK;
}

stek_status stek_solution_residual(const stek_solution* s, double* out) {
    if (require(s && out, "null argument") != STEK_OK) return STEK_ERR_INVALID_ARGUMENT;
    *out = s->s.residual;
    return STEK_OK;
}

stek_status stek_solution_iterations(const stek_solution* s, long* out) {
    if (require(s && out, "null argument") != STEK_OK) return STEK_ERR_INVALID_ARGUMENT;
    *out = s->s.iterations;
    return STEK_OK;
}

stek_status stek_solution_multiplicity(const stek_solution* s, int* out) {
    if (require(s && out, "null argument") != STEK_OK) return STEK_ERR_INVALID_ARGUMENT;
    *out = s->s.multiplicity;
    return STEK_OK;
}

stek_status stek_solution_json(const stek_solution* s, char** out) {
    if (require(s && out, "null argument") != STEK_OK) return STEK_ERR_INVALID_ARGUMENT;
    return guard([&] { *out = dup_string(s->s.to_json().dump(2)); });
}

stek_status stek_run_sweep(const char* config_json, char** summary_json, int* all_ok) {
    if (require(config_json != nullptr, "null argument") != STEK_OK)
        return STEK_ERR_INVALID_ARGUMENT;
    return guard([&] {
        stek::SweepReport rep = stek::run_sweep(parse_config(config_json));
        if (summary_json) *summary_json = dup_string(rep.to_json().dump(2));
        if (all_ok) *all_ok = rep.ok ? 1 : 0;
    });
}

stek_status stek_run_minimizer_sweep(const char* config_json, char** summary_json, int* all_ok) {
    if (require(config_json != nullptr, "null argument") != STEK_OK)
        return STEK_ERR_INVALID_ARGUMENT;
    return guard([&] {
        stek::MinimizerReport rep = stek::run_minimizer_sweep(parse_config(config_json));
        if (summary_json) *summary_json = dup_string(rep.to_json().dump(2));
        if (all_ok) *all_ok = (rep.ok && rep.decreasing) ? 1 : 0;
    });
}

stek_status stek_run_quotient_comparison(const char* config_json, char** summary_json,
                                         int* all_ok) {
    if (require(config_json != nullptr, "null argument") != STEK_OK)
        return STEK_ERR_INVALID_ARGUMENT;
    return guard([&] {
        stek::QuotientReport rep = stek::run_quotient_comparison(parse_config(config_json));
        if (summary_json) *summary_json = dup_string(rep.to_json().dump(2));
        if (all_ok) *all_ok = rep.ok ? 1 : 0;
    });
}

stek_status stek_run_lemma_checks(char** report_text, char** summary_json, int* all_ok) {
    return guard([&] {
        stek::LemmaReport rep = stek::run_lemma_checks();
        if (report_text) *report_text = dup_string(rep.text());
        if (summary_json) *summary_json = dup_string(rep.to_json().dump(2));
        if (all_ok) *all_ok = rep.all_passed ? 1 : 0;
    });
}

stek_status stek_run_oracle(const char* config_json, char** summary_json) {
    if (require(config_json != nullptr, "null argument") != STEK_OK)
        return STEK_ERR_INVALID_ARGUMENT;
    return guard([&] {
        stek::OracleReport rep = stek::run_oracle(parse_config(config_json));
        if (summary_json) *summary_json = dup_string(rep.to_json().dump(2));
    });
}

}  // extern "C"
