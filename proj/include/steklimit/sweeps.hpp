#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "steklimit/eigensolver.hpp"
#include "steklimit/radial_spectral.hpp"

namespace stek {

struct SolverConfig {
    double tol = 1e-10;
    long max_iters = 100000;
    int restarts = 4;
    std::uint64_t seed = 20240901;
};

// Mirrors the CLI config file field-for-field; unknown keys are rejected.
struct SweepConfig {
    int n = 2;
    double p = 2.0;
    double q = 2.0;
    std::string alpha = "constant:1";
    std::string map = "identity";
    double a_start = 0.4;
    double a_ratio = 0.5;
    int a_count = 6;
    double mesh_h = 0.02;
    double layer = 0.0;  // 0: auto rule min(mesh_h, a_eff/(2n))
    SolverConfig solver;
    bool outside_hypotheses = false;
    std::string out;
    int workers = 1;
    bool dump_mesh = false;
    bool refine_check = true;
    int oracle_cells = 600;
    int mode_index = 1;

    static SweepConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    void validate() const;  // throws std::invalid_argument / std::domain_error

    std::vector<double> grid() const { return concentration_grid(a_start, a_ratio, a_count); }
    double layer_for(double a_effective) const;
    double delta() const;  // rate exponent for the configured (p,q,n)
    bool linear_path() const { return p == 2.0 && q == 2.0; }
    bool radial_path() const { return n == 3; }
};

struct SweepPoint {
    double a = 0.0;
    double lambda_n = 0.0;
    double c_n = 0.0;
    double error = 0.0;         // |C^N - C^St|
    double refine_delta = 0.0;  // companion-solve estimate of the discretization floor
    long iterations = 0;
    double residual = 0.0;
    bool in_fit = false;
    bool failed = false;
    std::string message;
};

struct SweepReport {
    SweepConfig config;
    double lambda_st = 0.0;
    double c_st = 0.0;
    std::vector<SweepPoint> points;
    bool fit_attempted = false;
    double s_fit = 0.0;
    double fit_residual = 0.0;  // RMS in log units
    bool rate_conclusive = false;
    bool monotone_decreasing = false;
    bool ok = false;

    nlohmann::ordered_json to_json() const;
    std::string csv() const;
    std::string loglog_csv() const;
};

SweepReport run_sweep(const SweepConfig& cfg);

struct MinimizerPoint {
    double a = 0.0;
    double distance = 0.0;
    double lambda_n = 0.0;
    bool failed = false;
    std::string message;
};

struct MinimizerReport {
    SweepConfig config;
    std::vector<MinimizerPoint> points;
    bool decreasing = false;
    double last_over_first = 0.0;
    bool ok = false;

    nlohmann::ordered_json to_json() const;
    std::string csv() const;
};

MinimizerReport run_minimizer_sweep(const SweepConfig& cfg);

struct QuotientRow {
    std::string field;
    double a = 0.0;
    double bulk_seminorm = 0.0;
    double boundary_seminorm = 0.0;
    double gap = 0.0;
    double grad_norm = 0.0;
    double normalized = 0.0;  // gap / (a^{0.9 delta} ||grad u||_p)
};

struct QuotientReport {
    SweepConfig config;
    double rate_exponent = 0.0;  // 0.9 * delta
    std::vector<QuotientRow> rows;
    std::vector<std::string> fields;
    std::vector<bool> bounded;  // per field: normalized column <= 2x its first value
    bool ok = false;

    nlohmann::ordered_json to_json() const;
    std::string csv() const;
};

QuotientReport run_quotient_comparison(const SweepConfig& cfg);

struct LemmaCheck {
    std::string name;
    bool pass = false;
    double observed = 0.0;
    double expected = 0.0;
    double tolerance = 0.0;
};

struct LemmaReport {
    std::vector<LemmaCheck> checks;
    bool all_passed = false;

    nlohmann::ordered_json to_json() const;
    std::string text() const;  // one [PASS]/[FAIL] line per check
};

LemmaReport run_lemma_checks();

// One-off eigensolve driven by the config (CLI `steklov` / `neumann`).
struct SingleSolve {
    double a = 1.0;  // Neumann concentration parameter used
    double lambda = 0.0;
    double sharp_constant = 0.0;
    double residual = 0.0;
    long iterations = 0;
    int multiplicity = 1;
    std::vector<double> spectrum_head;

    nlohmann::ordered_json to_json() const;
};

SingleSolve solve_single(const SweepConfig& cfg, ProblemKind which, double a);

struct OracleRow {
    double a = 0.0;
    double lambda_n = 0.0;
    double refine_delta = 0.0;
    double distance = 0.0;
};

struct OracleReport {
    SweepConfig config;
    double steklov_exact = 0.0;
    double steklov_discrete = 0.0;
    std::vector<OracleRow> rows;

    nlohmann::ordered_json to_json() const;
    std::string csv() const;
};

OracleReport run_oracle(const SweepConfig& cfg);

// Writes report files next to `stem`: <stem>.csv, <stem>.json and, for
// sweeps, <stem>_loglog.csv. No-op when stem is empty.
void write_report_files(const std::string& stem, const std::string& csv,
                        const nlohmann::ordered_json& summary,
                        const std::string* loglog_csv = nullptr);

const char* version_string();

}  // namespace stek
