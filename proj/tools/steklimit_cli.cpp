// Command-line front end for the steklimit shared library. All numerics run
// behind the C API; this file only assembles config JSON and prints results.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "steklimit.h"

namespace {

using nlohmann::json;

struct CommonFlags {
    std::string config_path;
    std::optional<int> n;
    std::optional<double> p, q;
    std::optional<std::string> alpha, map, out;
    std::optional<double> a_start, a_ratio, mesh_h;
    std::optional<int> a_count, workers;
    bool dump_mesh = false;
    bool outside_hypotheses = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "config JSON file (mirrors the CLI flags)");
    cmd->add_option("--n", f.n, "dimension (2 or 3)");
    cmd->add_option("--p", f.p, "gradient exponent p");
    cmd->add_option("--q", f.q, "norm exponent q");
    cmd->add_option("--alpha", f.alpha, "boundary profile, e.g. constant:1 or fourier:1,0.5,0");
    cmd->add_option("--map", f.map, "transfer map: identity | radial-power:S | conformal:C");
    cmd->add_option("--a-start", f.a_start, "largest concentration parameter");
    cmd->add_option("--a-ratio", f.a_ratio, "geometric ratio of the a-grid");
    cmd->add_option("--a-count", f.a_count, "number of a-grid points");
    cmd->add_option("--mesh-h", f.mesh_h, "target interior mesh size");
    cmd->add_option("--out", f.out, "output stem for CSV/JSON reports");
    cmd->add_option("--workers", f.workers, "worker threads for per-a solves");
    cmd->add_flag("--dump-mesh", f.dump_mesh, "write the reference mesh next to --out");
    cmd->add_flag("--outside-hypotheses", f.outside_hypotheses,
                  "acknowledge exponents outside 1<p<n, 1<q<p(n-1)/(n-p) (sanity runs)");
}

json build_config(const CommonFlags& f) {
    json cfg = json::object();
    if (!f.config_path.empty()) {
        std::ifstream in(f.config_path);
        if (!in) {
            std::cerr << "error: cannot open config file " << f.config_path << "\n";
            std::exit(2);
        }
        in >> cfg;
    }
    if (f.n) cfg["n"] = *f.n;
    if (f.p) cfg["p"] = *f.p;
    if (f.q) cfg["q"] = *f.q;
    if (f.alpha) cfg["alpha"] = *f.alpha;
    if (f.map) cfg["map"] = *f.map;
    if (f.a_start) cfg["a_start"] = *f.a_start;
    if (f.a_ratio) cfg["a_ratio"] = *f.a_ratio;
    if (f.a_count) cfg["a_count"] = *f.a_count;
    if (f.mesh_h) cfg["mesh_h"] = *f.mesh_h;
    if (f.out) cfg["out"] = *f.out;
    if (f.workers) cfg["workers"] = *f.workers;
    if (f.dump_mesh) cfg["dump_mesh"] = true;
    if (f.outside_hypotheses) cfg["outside_hypotheses"] = true;
    return cfg;
}

int report_failure(stek_status status) {
    std::cerr << "error (" << static_cast<int>(status) << "): " << stek_last_error() << "\n";
    return status == STEK_OK ? 1 : static_cast<int>(status);
}

int run_driver(const json& cfg,
               stek_status (*driver)(const char*, char**, int*)) {
    char* summary = nullptr;
    int ok = 0;
    stek_status st = driver(cfg.dump().c_str(), &summary, &ok);
    if (st != STEK_OK) return report_failure(st);
    std::cout << summary << "\n";
    stek_string_free(summary);
    return ok ? 0 : 1;
}

int run_single(const json& cfg, const char* which, double a) {
    stek_solution* sol = nullptr;
    stek_status st = stek_solve(cfg.dump().c_str(), which, a, &sol);
    if (st != STEK_OK) return report_failure(st);
    char* text = nullptr;
    stek_solution_json(sol, &text);
    std::cout << text << "\n";
    stek_string_free(text);
    stek_solution_destroy(sol);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string("steklimit — concentrating-weight Neumann/Steklov eigenvalue "
                             "experiments (") +
                 stek_version() + ")"};
    app.require_subcommand(1);

    CommonFlags sweep_flags, min_flags, quot_flags, oracle_flags, st_flags, ne_flags;
    double neumann_a = 0.4;
    double steklov_a = 1.0;

    CLI::App* sweep = app.add_subcommand("sweep", "concentration sweep: Lambda^N(a) vs Lambda^St");
    add_common(sweep, sweep_flags);
    CLI::App* minimizers =
        app.add_subcommand("minimizers", "minimizer-distance sweep along the a-grid");
    add_common(minimizers, min_flags);
    CLI::App* quotient = app.add_subcommand(
        "quotient-compare", "bulk vs boundary centered seminorms on sample fields");
    add_common(quotient, quot_flags);
    CLI::App* lemma = app.add_subcommand("lemma-checks", "fixed-seed invariant suite");
    std::string lemma_out;
    lemma->add_option("--out", lemma_out, "output stem for the JSON report");
    CLI::App* oracle = app.add_subcommand("oracle", "radial-mode oracle table");
    add_common(oracle, oracle_flags);
    CLI::App* steklov = app.add_subcommand("steklov", "single Steklov eigensolve");
    add_common(steklov, st_flags);
    steklov->add_option("--a", steklov_a, "(unused placeholder for symmetry)");
    CLI::App* neumann = app.add_subcommand("neumann", "single weighted Neumann eigensolve");
    add_common(neumann, ne_flags);
    neumann->add_option("--a", neumann_a, "concentration parameter");

    CLI11_PARSE(app, argc, argv);

    if (sweep->parsed()) return run_driver(build_config(sweep_flags), stek_run_sweep);
    if (minimizers->parsed()) return run_driver(build_config(min_flags), stek_run_minimizer_sweep);
    if (quotient->parsed())
        return run_driver(build_config(quot_flags), stek_run_quotient_comparison);
    if (oracle->parsed()) {
        char* summary = nullptr;
        stek_status st = stek_run_oracle(build_config(oracle_flags).dump().c_str(), &summary);
        if (st != STEK_OK) return report_failure(st);
        std::cout << summary << "\n";
        stek_string_free(summary);
        return 0;
    }
    if (lemma->parsed()) {
        char* text = nullptr;
        char* summary = nullptr;
        int ok = 0;
        stek_status st = stek_run_lemma_checks(&text, &summary, &ok);
        if (st != STEK_OK) return report_failure(st);
        std::cout << text;
        if (!lemma_out.empty()) {
            std::ofstream f(lemma_out + ".json");
            f << summary << "\n";
        }
        stek_string_free(text);
        stek_string_free(summary);
        return ok ? 0 : 1;
    }
    if (steklov->parsed()) return run_single(build_config(st_flags), "steklov", steklov_a);
    if (neumann->parsed()) return run_single(build_config(ne_flags), "neumann", neumann_a);
    return 1;
}
