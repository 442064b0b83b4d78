#include "steklimit/sweeps.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <thread>

namespace stek {

namespace {

constexpr const char* kVersion = "steklimit 0.1.0";

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

SolveOptions to_solve_options(const SolverConfig& s) {
    SolveOptions o;
    o.stall_tol = s.tol;
    o.max_iterations = s.max_iters;
    o.restarts = s.restarts;
    o.seed = s.seed;
    return o;
}

void parallel_for(int count, int workers, const std::function<void(int)>& fn) {
    workers = std::max(1, std::min(workers, count));
    if (workers == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                int i = next.fetch_add(1);
                if (i >= count) break;
                fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

struct FitResult {
    bool attempted = false;
    double slope = 0.0;
    double residual = 0.0;
    int used = 0;
};

FitResult fit_loglog(const std::vector<double>& a, const std::vector<double>& e,
                     const std::vector<bool>& eligible) {
    FitResult out;
    const int count = static_cast<int>(a.size());
    const int tail = std::max(4, count - 1);
    std::vector<double> xs, ys;
    for (int i = std::max(0, count - tail); i < count; ++i) {
        if (!eligible[i] || !(e[i] > 0.0)) continue;
        xs.push_back(std::log(a[i]));
        ys.push_back(std::log(e[i]));
    }
    if (static_cast<int>(xs.size()) < 4) return out;
    out.attempted = true;
    out.used = static_cast<int>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= xs.size();
    my /= ys.size();
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    out.slope = sxy / sxx;
    double ss = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double r = ys[i] - my - out.slope * (xs[i] - mx);
        ss += r * r;
    }
    out.residual = std::sqrt(ss / xs.size());
    return out;
}

}  // namespace

const char* version_string() { return kVersion; }

double SweepConfig::layer_for(double a_effective) const {
    if (layer > 0.0) return std::min(layer, mesh_h);
    return std::min(mesh_h, a_effective / (2.0 * n));
}

double SweepConfig::delta() const { return Exponents::unchecked(p, q, n).delta(); }

void SweepConfig::validate() const {
    if (n != 2 && n != 3) throw std::invalid_argument("config: n must be 2 or 3");
    if (!(p > 1.0) || !(q > 1.0)) throw std::invalid_argument("config: exponents must exceed 1");
    if (!outside_hypotheses && !Exponents::unchecked(p, q, n).in_range())
        throw std::domain_error(
            "config: exponents violate 1<p<n, 1<q<p(n-1)/(n-p); set outside_hypotheses to "
            "acknowledge a sanity run");
    if (!(mesh_h > 0.0 && mesh_h <= 0.2)) throw std::invalid_argument("config: mesh_h outside (0,0.2]");
    if (layer < 0.0 || layer > mesh_h) throw std::invalid_argument("config: layer outside [0, mesh_h]");
    if (a_count < 1) throw std::invalid_argument("config: a_count must be positive");
    if (!(a_start > 0.0 && a_start <= 1.0)) throw std::invalid_argument("config: a_start outside (0,1]");
    if (!(a_ratio > 0.0 && a_ratio < 1.0)) throw std::invalid_argument("config: a_ratio outside (0,1)");
    if (workers < 1) throw std::invalid_argument("config: workers must be >= 1");
    if (mode_index < 1) throw std::invalid_argument("config: mode_index must be >= 1");
    if (oracle_cells < 50) throw std::invalid_argument("config: oracle_cells too small");
    BoundaryWeight::parse(alpha, n);  // representation check
    TransferMap::parse(map, n);
    if (n == 3) {
        if (p != 2.0 || q != 2.0)
            throw std::invalid_argument("config: n=3 runs use the radial oracle and need p=q=2");
        if (BoundaryWeight::parse(alpha, n).kind() != BoundaryWeight::Kind::Constant)
            throw std::invalid_argument("config: n=3 runs need a constant alpha");
        if (map != "identity") throw std::invalid_argument("config: n=3 runs need the identity map");
    }
}

SweepConfig SweepConfig::from_json(const nlohmann::json& j) {
    static const std::vector<std::string> known = {
        "n",    "p",       "q",       "alpha",   "map",          "a_start",
        "a_ratio", "a_count", "mesh_h",  "layer",   "solver",       "outside_hypotheses",
        "out",  "workers", "dump_mesh", "refine_check", "oracle_cells", "mode_index"};
    for (const auto& [key, value] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw std::invalid_argument("config: unknown key '" + key + "'");
    }
    SweepConfig c;
    if (j.contains("n")) c.n = j.at("n").get<int>();
    if (j.contains("p")) c.p = j.at("p").get<double>();
    if (j.contains("q")) c.q = j.at("q").get<double>();
    if (j.contains("alpha")) c.alpha = j.at("alpha").get<std::string>();
    if (j.contains("map")) c.map = j.at("map").get<std::string>();
    if (j.contains("a_start")) c.a_start = j.at("a_start").get<double>();
    if (j.contains("a_ratio")) c.a_ratio = j.at("a_ratio").get<double>();
    if (j.contains("a_count")) c.a_count = j.at("a_count").get<int>();
    if (j.contains("mesh_h")) c.mesh_h = j.at("mesh_h").get<double>();
    if (j.contains("layer")) c.layer = j.at("layer").get<double>();
    if (j.contains("outside_hypotheses")) c.outside_hypotheses = j.at("outside_hypotheses").get<bool>();
    if (j.contains("out")) c.out = j.at("out").get<std::string>();
    if (j.contains("workers")) c.workers = j.at("workers").get<int>();
    if (j.contains("dump_mesh")) c.dump_mesh = j.at("dump_mesh").get<bool>();
    if (j.contains("refine_check")) c.refine_check = j.at("refine_check").get<bool>();
    if (j.contains("oracle_cells")) c.oracle_cells = j.at("oracle_cells").get<int>();
    if (j.contains("mode_index")) c.mode_index = j.at("mode_index").get<int>();
    if (j.contains("solver")) {
        const auto& s = j.at("solver");
        static const std::vector<std::string> solver_known = {"tol", "max_iters", "restarts", "seed"};
        for (const auto& [key, value] : s.items()) {
            if (std::find(solver_known.begin(), solver_known.end(), key) == solver_known.end())
                throw std::invalid_argument("config: unknown solver key '" + key + "'");
        }
        if (s.contains("tol")) c.solver.tol = s.at("tol").get<double>();
        if (s.contains("max_iters")) c.solver.max_iters = s.at("max_iters").get<long>();
        if (s.contains("restarts")) c.solver.restarts = s.at("restarts").get<int>();
        if (s.contains("seed")) c.solver.seed = s.at("seed").get<std::uint64_t>();
    }
    c.validate();
    return c;
}

nlohmann::json SweepConfig::to_json() const {
    nlohmann::ordered_json j;
    j["n"] = n;
    j["p"] = p;
    j["q"] = q;
    j["alpha"] = alpha;
    j["map"] = map;
    j["a_start"] = a_start;
    j["a_ratio"] = a_ratio;
    j["a_count"] = a_count;
    j["mesh_h"] = mesh_h;
    j["layer"] = layer;
    j["solver"] = {{"tol", solver.tol},
                   {"max_iters", solver.max_iters},
                   {"restarts", solver.restarts},
                   {"seed", solver.seed}};
    j["outside_hypotheses"] = outside_hypotheses;
    j["out"] = out;
    j["workers"] = workers;
    j["dump_mesh"] = dump_mesh;
    j["refine_check"] = refine_check;
    j["oracle_cells"] = oracle_cells;
    j["mode_index"] = mode_index;
    return j;
}

namespace {

nlohmann::ordered_json stamp(const SweepConfig& cfg) {
    nlohmann::ordered_json s;
    s["version"] = kVersion;
    s["layer_rule"] = cfg.layer > 0.0 ? "fixed" : "min(mesh_h, a_eff/(2n))";
    s["tol"] = cfg.solver.tol;
    s["seed"] = cfg.solver.seed;
    s["restarts"] = cfg.solver.restarts;
    return s;
}

// Builds the disk-side forms for the configured problem. The conformal kind
// is handled by pullback (mu_a bulk weight, omega_p energy weight); identity
// and radial-power act on the disk itself, so gamma_a is used directly and
// the energy stays plain.
AssembledForms build_forms(const SweepConfig& cfg, double a, double h) {
    BoundaryWeight alpha = BoundaryWeight::parse(cfg.alpha, cfg.n);
    TransferMap map = TransferMap::parse(cfg.map, cfg.n);
    const bool conformal = map.kind() == TransferMap::Kind::ConformalQuadratic;
    const double a_eff =
        map.kind() == TransferMap::Kind::RadialPower ? a * map.parameter() : a;

    double layer = a > 0.0 ? std::min(cfg.layer_for(a_eff), h) : h;
    auto mesh = std::make_shared<DiskMesh>(build_disk_mesh(h, layer));

    std::function<double(Vec2)> bulk;
    if (a > 0.0) {
        ConcentratingWeight w(alpha, a, cfg.n);
        if (conformal) {
            bulk = [w](Vec2 x) {
                double r = std::min(x.norm(), 1.0);
                return w.mu(r, std::atan2(x.y(), x.x()));
            };
        } else {
            InducedWeights iw = induce_weights(map, w);
            bulk = [iw](Vec2 x) { return iw.gamma(x); };
        }
    } else {
        bulk = [](Vec2) { return 1.0; };
    }
    auto boundary = [alpha](double theta) { return alpha(theta); };
    const TransferMap energy_map = conformal ? map : TransferMap::identity(2);
    return assemble(mesh, bulk, boundary, energy_map, cfg.p);
}

EigenResult solve_problem(const SweepConfig& cfg, const AssembledForms& forms, ProblemKind which) {
    SolveOptions opts = to_solve_options(cfg.solver);
    if (cfg.linear_path()) return solve_linear(forms, which, opts);
    return minimize_quotient(forms, which, cfg.p, cfg.q, opts);
}

}  // namespace

SweepReport run_sweep(const SweepConfig& cfg) {
    cfg.validate();
    SweepReport rep;
    rep.config = cfg;
    const std::vector<double> grid = cfg.grid();
    rep.points.resize(grid.size());

    if (cfg.radial_path()) {
        SteklovMode sm = mode_steklov(3, cfg.mode_index);
        rep.lambda_st = sm.exact;
        rep.c_st = std::pow(sm.exact, -1.0 / cfg.p);
        BoundaryWeight alpha = BoundaryWeight::parse(cfg.alpha, 3);
        parallel_for(static_cast<int>(grid.size()), cfg.workers, [&](int i) {
            SweepPoint& pt = rep.points[i];
            pt.a = grid[i];
            try {
                ConcentratingWeight w(alpha, grid[i], 3);
                ModeEigen me = mode_neumann(3, cfg.mode_index, w, cfg.oracle_cells);
                pt.lambda_n = me.value;
                pt.c_n = std::pow(me.value, -1.0 / cfg.p);
                pt.refine_delta =
                    std::abs(std::pow(me.fine, -1.0 / cfg.p) - std::pow(me.coarse, -1.0 / cfg.p));
                pt.iterations = 1;
                pt.residual = 0.0;
                pt.error = std::abs(pt.c_n - rep.c_st);
            } catch (const std::exception& e) {
                pt.failed = true;
                pt.message = e.what();
            }
        });
    } else {
        AssembledForms st_forms = build_forms(cfg, 0.0, cfg.mesh_h);
        EigenResult st = solve_problem(cfg, st_forms, ProblemKind::Steklov);
        rep.lambda_st = st.lambda;
        rep.c_st = st.sharp_constant;
        if (cfg.dump_mesh && !cfg.out.empty()) write_mesh_file(*st_forms.mesh, cfg.out + "_mesh.txt");
        parallel_for(static_cast<int>(grid.size()), cfg.workers, [&](int i) {
            SweepPoint& pt = rep.points[i];
            pt.a = grid[i];
            try {
                AssembledForms forms = build_forms(cfg, grid[i], cfg.mesh_h);
                EigenResult res = solve_problem(cfg, forms, ProblemKind::Neumann);
                pt.lambda_n = res.lambda;
                pt.c_n = res.sharp_constant;
                pt.iterations = res.iterations;
                pt.residual = res.weak_residual;
                pt.error = std::abs(pt.c_n - rep.c_st);
                if (cfg.refine_check) {
                    double h2 = std::min(2.0 * cfg.mesh_h, 0.2);
                    AssembledForms coarse = build_forms(cfg, grid[i], h2);
                    EigenResult cres = solve_problem(cfg, coarse, ProblemKind::Neumann);
                    pt.refine_delta = std::abs(pt.c_n - cres.sharp_constant);
                }
            } catch (const std::exception& e) {
                pt.failed = true;
                pt.message = e.what();
            }
        });
    }

    rep.ok = true;
    std::vector<double> av, ev;
    std::vector<bool> eligible;
    for (const auto& pt : rep.points) {
        if (pt.failed) rep.ok = false;
        av.push_back(pt.a);
        ev.push_back(pt.error);
        eligible.push_back(!pt.failed &&
                           (pt.refine_delta <= 0.25 * pt.error || pt.refine_delta == 0.0));
    }
    FitResult fit = fit_loglog(av, ev, eligible);
    rep.fit_attempted = fit.attempted;
    rep.s_fit = fit.slope;
    rep.fit_residual = fit.residual;
    rep.rate_conclusive = fit.attempted && fit.residual <= 0.2;
    for (std::size_t i = 0; i < rep.points.size(); ++i) {
        const int count = static_cast<int>(rep.points.size());
        const int tail = std::max(4, count - 1);
        rep.points[i].in_fit = fit.attempted && static_cast<int>(i) >= count - tail &&
                               eligible[i] && rep.points[i].error > 0.0;
    }
    rep.monotone_decreasing = rep.ok && rep.points.size() > 1;
    for (std::size_t i = 1; i < rep.points.size() && rep.monotone_decreasing; ++i)
        if (!(rep.points[i].error < rep.points[i - 1].error)) rep.monotone_decreasing = false;

    if (!cfg.out.empty()) {
        std::string ll = rep.loglog_csv();
        write_report_files(cfg.out, rep.csv(), rep.to_json(), &ll);
    }
    return rep;
}

std::string SweepReport::csv() const {
    std::string s = "a,lambda_n,c_n,error,refine_delta,iterations,residual,in_fit\n";
    for (const auto& pt : points) {
        if (pt.failed) {
            s += fmt(pt.a) + ",FAILED,,,,,,\n";
            continue;
        }
        s += fmt(pt.a) + ',' + fmt(pt.lambda_n) + ',' + fmt(pt.c_n) + ',' + fmt(pt.error) + ',' +
             fmt(pt.refine_delta) + ',' + std::to_string(pt.iterations) + ',' + fmt(pt.residual) +
             ',' + (pt.in_fit ? "1" : "0") + '\n';
    }
    return s;
}

std::string SweepReport::loglog_csv() const {
    std::string s = "log_a,log_error\n";
    for (const auto& pt : points) {
        if (pt.failed || !(pt.error > 0.0)) continue;
        s += fmt(std::log(pt.a)) + ',' + fmt(std::log(pt.error)) + '\n';
    }
    return s;
}

nlohmann::ordered_json SweepReport::to_json() const {
    nlohmann::ordered_json j;
    j["config"] = config.to_json();
    j["lambda_st"] = lambda_st;
    j["c_st"] = c_st;
    auto pts = nlohmann::ordered_json::array();
    for (const auto& pt : points) {
        nlohmann::ordered_json pj;
        pj["a"] = pt.a;
        if (pt.failed) {
            pj["failed"] = true;
            pj["message"] = pt.message;
        } else {
            pj["lambda_n"] = pt.lambda_n;
            pj["c_n"] = pt.c_n;
            pj["error"] = pt.error;
            pj["refine_delta"] = pt.refine_delta;
            pj["iterations"] = pt.iterations;
            pj["residual"] = pt.residual;
            pj["in_fit"] = pt.in_fit;
        }
        pts.push_back(pj);
    }
    j["points"] = pts;
    j["fit"] = {{"attempted", fit_attempted},
                {"s_fit", s_fit},
                {"residual_log", fit_residual},
                {"rate_conclusive", rate_conclusive}};
    if (fit_attempted && !rate_conclusive) j["fit"]["note"] = "rate inconclusive";
    j["monotone_decreasing"] = monotone_decreasing;
    j["ok"] = ok;
    j["stamp"] = stamp(config);
    return j;
}

MinimizerReport run_minimizer_sweep(const SweepConfig& cfg) {
    cfg.validate();
    if (!cfg.radial_path() && !cfg.linear_path())
        throw std::invalid_argument(
            "minimizer sweep: supported on the radial path (n=3) or the linear FEM path (p=q=2)");
    MinimizerReport rep;
    rep.config = cfg;
    const std::vector<double> grid = cfg.grid();
    rep.points.resize(grid.size());

    if (cfg.radial_path()) {
        BoundaryWeight alpha = BoundaryWeight::parse(cfg.alpha, 3);
        parallel_for(static_cast<int>(grid.size()), cfg.workers, [&](int i) {
            MinimizerPoint& pt = rep.points[i];
            pt.a = grid[i];
            try {
                ConcentratingWeight w(alpha, grid[i], 3);
                pt.distance = mode_minimizer_distance(3, cfg.mode_index, w, cfg.oracle_cells);
                pt.lambda_n = mode_neumann(3, cfg.mode_index, w, cfg.oracle_cells).value;
            } catch (const std::exception& e) {
                pt.failed = true;
                pt.message = e.what();
            }
        });
    } else {
        parallel_for(static_cast<int>(grid.size()), cfg.workers, [&](int i) {
            MinimizerPoint& pt = rep.points[i];
            pt.a = grid[i];
            try {
                AssembledForms forms = build_forms(cfg, grid[i], cfg.mesh_h);
                SolveOptions opts = to_solve_options(cfg.solver);
                EigenResult neumann = solve_linear(forms, ProblemKind::Neumann, opts);
                EigenResult steklov = solve_linear(forms, ProblemKind::Steklov, opts);
                pt.lambda_n = neumann.lambda;

                const Eigen::VectorXd& u = neumann.minimizer.values;
                const Eigen::VectorXd& v1 = steklov.minimizer.values;
                const Eigen::VectorXd* v2 =
                    steklov.degenerate_pair ? &steklov.degenerate_pair->values : nullptr;
                auto dist_to = [&](const Eigen::VectorXd& v) {
                    Eigen::VectorXd d = u - v;
                    return std::sqrt(forms.plain_energy.value(d, 2.0)) +
                           std::sqrt(forms.plain_bulk.norm_q_pow(d, 0.0, 2.0));
                };
                double best = std::numeric_limits<double>::infinity();
                const int nrot = v2 ? 256 : 1;
                for (int k = 0; k < nrot; ++k) {
                    double t = std::numbers::pi * k / nrot;
                    Eigen::VectorXd v = v2 ? (std::cos(t) * v1 + std::sin(t) * *v2).eval() : v1;
                    // renormalize the combination in the boundary norm
                    double nn = forms.boundary_norm.norm_q_pow(v, 0.0, 2.0);
                    if (nn > 0.0) v /= std::pow(nn, 0.5);
                    best = std::min({best, dist_to(v), dist_to((-v).eval())});
                }
                pt.distance = best;
            } catch (const std::exception& e) {
                pt.failed = true;
                pt.message = e.what();
            }
        });
    }

    rep.ok = true;
    for (const auto& pt : rep.points)
        if (pt.failed) rep.ok = false;
    rep.decreasing = rep.ok && rep.points.size() > 1;
    for (std::size_t i = 1; i < rep.points.size() && rep.decreasing; ++i)
        if (!(rep.points[i].distance < rep.points[i - 1].distance)) rep.decreasing = false;
    if (rep.ok && !rep.points.empty() && rep.points.front().distance > 0.0)
        rep.last_over_first = rep.points.back().distance / rep.points.front().distance;

    if (!cfg.out.empty()) write_report_files(cfg.out, rep.csv(), rep.to_json());
    return rep;
}

std::string MinimizerReport::csv() const {
    std::string s = "a,distance,lambda_n\n";
    for (const auto& pt : points) {
        if (pt.failed) {
            s += fmt(pt.a) + ",FAILED,\n";
            continue;
        }
        s += fmt(pt.a) + ',' + fmt(pt.distance) + ',' + fmt(pt.lambda_n) + '\n';
    }
    return s;
}

nlohmann::ordered_json MinimizerReport::to_json() const {
    nlohmann::ordered_json j;
    j["config"] = config.to_json();
    auto pts = nlohmann::ordered_json::array();
    for (const auto& pt : points) {
        nlohmann::ordered_json pj;
        pj["a"] = pt.a;
        if (pt.failed) {
            pj["failed"] = true;
            pj["message"] = pt.message;
        } else {
            pj["distance"] = pt.distance;
            pj["lambda_n"] = pt.lambda_n;
        }
        pts.push_back(pj);
    }
    j["points"] = pts;
    j["decreasing"] = decreasing;
    j["last_over_first"] = last_over_first;
    j["ok"] = ok;
    j["stamp"] = stamp(config);
    return j;
}

QuotientReport run_quotient_comparison(const SweepConfig& cfg) {
    cfg.validate();
    if (cfg.radial_path())
        throw std::invalid_argument("quotient comparison runs on the 2D FEM path");
    QuotientReport rep;
    rep.config = cfg;
    rep.rate_exponent = 0.9 * cfg.delta();
    TransferMap map = TransferMap::parse(cfg.map, 2);

    struct Sample {
        std::string name;
        std::function<double(Vec2)> f;  // evaluated at disk-mesh vertices (pullback side)
    };
    std::vector<Sample> samples;
    samples.push_back({"constant", [](Vec2) { return 1.0; }});
    samples.push_back({"coordinate-x1", [map](Vec2 x) { return map.forward(x).x(); }});
    samples.push_back({"harmonic-cos2", [](Vec2 x) { return x.x() * x.x() - x.y() * x.y(); }});
    samples.push_back({"layer-probe", [](Vec2 x) {
                           double r = std::min(x.norm(), 1.0);
                           return r == 0.0 ? 0.0 : (1.0 - r) * x.x() / r;
                       }});
    for (const auto& s : samples) rep.fields.push_back(s.name);

    const std::vector<double> grid = cfg.grid();
    std::vector<std::vector<QuotientRow>> slots(grid.size());
    parallel_for(static_cast<int>(grid.size()), cfg.workers, [&](int i) {
        AssembledForms forms = build_forms(cfg, grid[i], cfg.mesh_h);
        for (const auto& s : samples) {
            DiscreteField u = interpolate(forms.mesh, s.f);
            double cb = forms.bulk_norm.qcenter(u.values, cfg.q);
            double bulk = std::pow(forms.bulk_norm.norm_q_pow(u.values, cb, cfg.q), 1.0 / cfg.q);
            double cs = forms.boundary_norm.qcenter(u.values, cfg.q);
            double bdry =
                std::pow(forms.boundary_norm.norm_q_pow(u.values, cs, cfg.q), 1.0 / cfg.q);
            QuotientRow row;
            row.field = s.name;
            row.a = grid[i];
            row.bulk_seminorm = bulk;
            row.boundary_seminorm = bdry;
            row.gap = std::abs(bulk - bdry);
            row.grad_norm = std::pow(forms.energy.value(u.values, cfg.p), 1.0 / cfg.p);
            // fields with no gradient (constants) have an exactly-zero gap
            row.normalized = row.grad_norm > 1e-10
                                 ? row.gap / (std::pow(grid[i], rep.rate_exponent) * row.grad_norm)
                                 : 0.0;
            slots[i].push_back(row);
        }
    });
    for (const auto& group : slots)
        for (const auto& row : group) rep.rows.push_back(row);

    rep.ok = true;
    for (const auto& s : samples) {
        double first = -1.0;
        bool bounded = true;
        for (const auto& row : rep.rows) {
            if (row.field != s.name) continue;
            if (first < 0.0) first = row.normalized;
            if (row.normalized > 2.0 * first + 1e-12) bounded = false;
        }
        rep.bounded.push_back(bounded);
        if (!bounded) rep.ok = false;
    }
    if (!cfg.out.empty()) write_report_files(cfg.out, rep.csv(), rep.to_json());
    return rep;
}

std::string QuotientReport::csv() const {
    std::string s = "field,a,bulk_seminorm,boundary_seminorm,gap,grad_p_norm,normalized_gap\n";
    for (const auto& r : rows)
        s += r.field + ',' + fmt(r.a) + ',' + fmt(r.bulk_seminorm) + ',' + fmt(r.boundary_seminorm) +
             ',' + fmt(r.gap) + ',' + fmt(r.grad_norm) + ',' + fmt(r.normalized) + '\n';
    return s;
}

nlohmann::ordered_json QuotientReport::to_json() const {
    nlohmann::ordered_json j;
    j["config"] = config.to_json();
    j["rate_exponent"] = rate_exponent;
    auto rows_json = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        rows_json.push_back({{"field", r.field},
                             {"a", r.a},
                             {"bulk_seminorm", r.bulk_seminorm},
                             {"boundary_seminorm", r.boundary_seminorm},
                             {"gap", r.gap},
                             {"grad_p_norm", r.grad_norm},
                             {"normalized_gap", r.normalized}});
    }
    j["rows"] = rows_json;
    auto bounded_json = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < fields.size(); ++i) bounded_json[fields[i]] = bounded[i];
    j["bounded"] = bounded_json;
    j["ok"] = ok;
    j["stamp"] = stamp(config);
    return j;
}

SingleSolve solve_single(const SweepConfig& cfg, ProblemKind which, double a) {
    cfg.validate();
    SingleSolve out;
    out.a = a;
    if (cfg.radial_path()) {
        BoundaryWeight alpha = BoundaryWeight::parse(cfg.alpha, 3);
        if (which == ProblemKind::Neumann) {
            ConcentratingWeight w(alpha, a, 3);
            ModeEigen me = mode_neumann(3, cfg.mode_index, w, cfg.oracle_cells);
            out.lambda = me.value;
            out.residual = me.refine_delta;
        } else {
            out.lambda = mode_steklov(3, cfg.mode_index).exact;
        }
        out.iterations = 1;
        out.sharp_constant = std::pow(out.lambda, -1.0 / cfg.p);
        return out;
    }
    AssembledForms forms = build_forms(cfg, which == ProblemKind::Neumann ? a : 0.0, cfg.mesh_h);
    if (cfg.dump_mesh && !cfg.out.empty()) write_mesh_file(*forms.mesh, cfg.out + "_mesh.txt");
    EigenResult res = solve_problem(cfg, forms, which);
    out.lambda = res.lambda;
    out.sharp_constant = res.sharp_constant;
    out.residual = res.weak_residual;
    out.iterations = res.iterations;
    out.multiplicity = res.degenerate_pair ? 2 : 1;
    out.spectrum_head = res.spectrum_head;
    return out;
}

nlohmann::ordered_json SingleSolve::to_json() const {
    nlohmann::ordered_json j;
    j["a"] = a;
    j["lambda"] = lambda;
    j["sharp_constant"] = sharp_constant;
    j["residual"] = residual;
    j["iterations"] = iterations;
    j["multiplicity"] = multiplicity;
    j["spectrum_head"] = spectrum_head;
    return j;
}

OracleReport run_oracle(const SweepConfig& cfg) {
    SweepConfig rcfg = cfg;
    rcfg.validate();
    if (rcfg.n == 2 &&
        (BoundaryWeight::parse(rcfg.alpha, 2).kind() != BoundaryWeight::Kind::Constant ||
         rcfg.map != "identity" || !rcfg.linear_path()))
        throw std::invalid_argument("oracle: needs a constant alpha, identity map and p=q=2");
    OracleReport rep;
    rep.config = rcfg;
    SteklovMode sm = mode_steklov(rcfg.n, rcfg.mode_index);
    rep.steklov_exact = sm.exact;
    rep.steklov_discrete = sm.discrete;
    BoundaryWeight alpha = BoundaryWeight::parse(rcfg.alpha, rcfg.n);
    const std::vector<double> grid = rcfg.grid();
    rep.rows.resize(grid.size());
    parallel_for(static_cast<int>(grid.size()), rcfg.workers, [&](int i) {
        ConcentratingWeight w(alpha, grid[i], rcfg.n);
        ModeEigen me = mode_neumann(rcfg.n, rcfg.mode_index, w, rcfg.oracle_cells);
        OracleRow& row = rep.rows[i];
        row.a = grid[i];
        row.lambda_n = me.value;
        row.refine_delta = me.refine_delta;
        row.distance = mode_minimizer_distance(rcfg.n, rcfg.mode_index, w, rcfg.oracle_cells);
    });
    if (!rcfg.out.empty()) write_report_files(rcfg.out, rep.csv(), rep.to_json());
    return rep;
}

std::string OracleReport::csv() const {
    std::string s = "a,lambda_n,refine_delta,minimizer_distance\n";
    for (const auto& r : rows)
        s += fmt(r.a) + ',' + fmt(r.lambda_n) + ',' + fmt(r.refine_delta) + ',' + fmt(r.distance) +
             '\n';
    return s;
}

nlohmann::ordered_json OracleReport::to_json() const {
    nlohmann::ordered_json j;
    j["config"] = config.to_json();
    j["steklov_exact"] = steklov_exact;
    j["steklov_discrete"] = steklov_discrete;
    auto rows_json = nlohmann::ordered_json::array();
    for (const auto& r : rows)
        rows_json.push_back({{"a", r.a},
                             {"lambda_n", r.lambda_n},
                             {"refine_delta", r.refine_delta},
                             {"minimizer_distance", r.distance}});
    j["rows"] = rows_json;
    j["stamp"] = stamp(config);
    return j;
}

void write_report_files(const std::string& stem, const std::string& csv,
                        const nlohmann::ordered_json& summary, const std::string* loglog_csv) {
    if (stem.empty()) return;
    {
        std::ofstream f(stem + ".csv");
        if (!f) throw std::runtime_error("cannot write " + stem + ".csv");
        f << csv;
    }
    {
        std::ofstream f(stem + ".json");
        if (!f) throw std::runtime_error("cannot write " + stem + ".json");
        f << summary.dump(2) << '\n';
    }
    if (loglog_csv) {
        std::ofstream f(stem + "_loglog.csv");
        if (!f) throw std::runtime_error("cannot write " + stem + "_loglog.csv");
        f << *loglog_csv;
    }
}

}  // namespace stek
