#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "steklimit/circle.hpp"
#include "steklimit/quadrature.hpp"
#include "steklimit/sweeps.hpp"
#include "steklimit/transfer_map.hpp"

namespace stek {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Suite {
    std::vector<LemmaCheck> checks;

    void leq(const std::string& name, double observed, double tol) {
        checks.push_back({name, observed <= tol, observed, 0.0, tol});
    }
    void close(const std::string& name, double observed, double expected, double tol) {
        checks.push_back({name, std::abs(observed - expected) <= tol, observed, expected, tol});
    }
    void geq(const std::string& name, double observed, double bound) {
        checks.push_back({name, observed >= bound, observed, bound, 0.0});
    }
    void flag(const std::string& name, bool pass, double observed = 0.0) {
        checks.push_back({name, pass, observed, 0.0, 0.0});
    }
};

std::vector<double> default_grid() { return concentration_grid(); }

void weight_checks(Suite& s) {
    // Radial normalization over a log grid and both dimensions.
    double worst = 0.0;
    for (int n : {2, 3}) {
        double a = 1.0;
        for (int j = 0; j <= 10; ++j, a *= 0.5) {
            ConcentratingWeight w(BoundaryWeight::constant(1.0, n), a, n);
            worst = std::max(worst, std::abs(w.radial_mass() - 1.0));
        }
    }
    s.leq("weight/radial-mass-unit", worst, 1e-15);

    // Total mass of mu_a independent of a; Fourier profile integrates exactly.
    {
        BoundaryWeight alpha = BoundaryWeight::fourier(1.0, {1.0}, {});
        ConcentratingWeight w1(alpha, 0.7, 2), w2(alpha, 0.05, 2);
        s.leq("weight/mu-mass-a-independent", std::abs(w1.total_mass() - w2.total_mass()), 0.0);
        s.close("weight/mu-mass-fourier", w1.total_mass(), kTwoPi, 1e-12);
    }
    // Cross-check A_alpha against bulk polar quadrature of mu_a.
    {
        BoundaryWeight alpha = BoundaryWeight::fourier(1.0, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.5});
        ConcentratingWeight w(alpha, 0.35, 2);
        auto radial = graded_unit_nodes();
        double bulk = 0.0;
        const int ntheta = 2048;
        for (int i = 0; i < ntheta; ++i) {
            double theta = i * kTwoPi / ntheta;
            double ray = 0.0;
            for (const auto& [r, wt] : radial) ray += wt * w.rho(r) * r;
            bulk += ray * alpha(theta);
        }
        bulk *= kTwoPi / ntheta;
        s.close("weight/mu-mass-bulk-quadrature", bulk, w.total_mass(), 1e-8);
    }

    // Layer sup: analytic maximizer vs a 1e-5 grid search; rate boundedness.
    {
        double worst_arg = 0.0;
        for (double m : {2.0, 1.5}) {
            for (double a : default_grid()) {
                ConcentratingWeight w(BoundaryWeight::constant(1.0, 2), a, 2);
                LayerSup ls = layer_sup(w, m);
                double best_r = 0.0, best_v = -1.0;
                for (int i = 0; i < 100000; ++i) {
                    double r = (i + 0.5) * 1e-5;
                    double v = std::pow(1.0 - r, m) * w.rho(r);
                    if (v > best_v) {
                        best_v = v;
                        best_r = r;
                    }
                }
                worst_arg = std::max(worst_arg, std::abs(best_r - ls.argmax_r));
            }
        }
        s.leq("weight/layer-sup-grid-argmax", worst_arg, 1.1e-5);

        const double m = 2.0;
        double prev = -1.0;
        bool monotone = true;
        double first = 0.0;
        bool first_set = false;
        for (double a : default_grid()) {
            ConcentratingWeight w(BoundaryWeight::constant(1.0, 2), a, 2);
            double v = layer_sup(w, m).value * std::pow(a, 1.0 - m);
            if (!first_set) {
                first = v;
                first_set = true;
            }
            if (prev >= 0.0 && v > prev * (1.0 + 1e-9)) monotone = false;
            prev = v;
        }
        s.flag("weight/layer-sup-rate-monotone-bounded", monotone, first);
    }

    // Decay moment closed forms and quadrature cross-check.
    {
        ConcentratingWeight w(BoundaryWeight::constant(1.0, 2), 1.0, 2);
        s.close("weight/beta-moment-sq1", beta_moment(w, 0.5, 2.0), 1.0 / 3.0, 1e-12);
        s.close("weight/beta-moment-sq2", beta_moment(w, 1.0, 2.0), 1.0 / 6.0, 1e-12);
        ConcentratingWeight w3(BoundaryWeight::constant(1.0, 3), 0.2, 3);
        double quad = adaptive_integral(
            [&](double r) { return std::pow(1.0 - r, 1.7) * w3.rho(r) * r * r; }, 0.0, 1.0, 1e-13,
            1e-13);
        s.close("weight/beta-moment-adaptive-quadrature", beta_moment(w3, 0.85, 2.0), quad, 1e-10);

        // beta_moment(a)/a^{sq} stays bounded along the grid (monotone tail).
        std::vector<double> ratios;
        for (double a : default_grid()) {
            ConcentratingWeight wa(BoundaryWeight::constant(1.0, 2), a, 2);
            ratios.push_back(beta_moment(wa, 0.75, 2.0) / std::pow(a, 1.5));
        }
        double mx = *std::max_element(ratios.begin(), ratios.end());
        double ends = std::max(ratios.front(), ratios.back());
        s.leq("weight/beta-moment-rate-bounded", mx / ends, 1.0 + 1e-9);
    }

    // delta_{p,q} identity (p theta - 1)/q when p < q.
    {
        std::mt19937_64 rng(321);
        std::uniform_real_distribution<double> dist(0.0, 1.0);
        double worst_id = 0.0;
        for (int trial = 0; trial < 200; ++trial) {
            int n = trial % 2 == 0 ? 3 : 4;
            double p = 1.0 + dist(rng) * (n - 1.0 - 1e-3);
            double qmax = p * (n - 1.0) / (n - p);
            if (qmax <= p) continue;
            double q = p + dist(rng) * (qmax - p - 1e-9);
            Exponents b = Exponents::checked(p, q, n);
            double via_theta = (p * b.theta() - 1.0) / q;
            worst_id = std::max(worst_id, std::abs(delta_exponent(b) - via_theta));
        }
        s.leq("weight/delta-theta-identity", worst_id, 1e-12);
    }
}

void circle_checks(Suite& s) {
    const CircleFunction g = CircleFunction::random(8, 77);

    // Semigroup property, coefficientwise and exact.
    {
        CircleFunction a = poisson_extend(poisson_extend(g, 0.6), 0.7);
        CircleFunction b = poisson_extend(g, 0.42);
        double worst = std::abs(a.c0() - b.c0());
        for (int k = 1; k <= g.degree(); ++k)
            worst = std::max({worst, std::abs(a.cos_coeff(k) - b.cos_coeff(k)),
                              std::abs(a.sin_coeff(k) - b.sin_coeff(k))});
        s.leq("circle/poisson-semigroup", worst, 1e-15);
    }
    // L2 contraction.
    {
        double worst = 0.0;
        for (double r : {0.1, 0.5, 0.9, 0.99})
            worst = std::max(worst, poisson_extend(g, r).l2_norm() / g.l2_norm());
        s.leq("circle/poisson-contraction", worst, 1.0 + 1e-14);
    }
    // Kernel quadrature: coefficients of P_r g from the Poisson kernel integral.
    {
        const double r = 0.5;
        CircleFunction pg = poisson_extend(g, r);
        double worst = 0.0;
        for (double theta : {0.0, 0.9, 2.2, 4.4}) {
            double integral = periodic_integral(
                [&](double eta) {
                    double num = 1.0 - r * r;
                    double dx = r * std::cos(theta) - std::cos(eta);
                    double dy = r * std::sin(theta) - std::sin(eta);
                    return num / (kTwoPi * (dx * dx + dy * dy)) * g(eta);
                },
                4096);
            worst = std::max(worst, std::abs(integral - pg(theta)));
        }
        s.leq("circle/poisson-kernel-quadrature", worst, 1e-8);
    }
    // Gap vanishes on constants; closed form at a=1; monotone in a; slope.
    {
        ConcentratingWeight w(BoundaryWeight::constant(1.0, 2), 1.0, 2);
        s.leq("circle/poisson-radial-gap-constant",
              poisson_radial_gap(CircleFunction::constant(3.0), w, 2.0), 1e-13);
        double gap = poisson_radial_gap(CircleFunction::harmonic(1, 1.0), w, 2.0);
        s.close("circle/poisson-radial-gap-closed-form", gap, std::sqrt(std::numbers::pi / 6.0),
                1e-8);

        std::vector<double> gaps;
        for (double a : default_grid()) {
            ConcentratingWeight wa(BoundaryWeight::constant(1.0, 2), a, 2);
            gaps.push_back(poisson_radial_gap(CircleFunction::harmonic(1, 1.0), wa, 2.0));
        }
        bool mono = true;
        for (std::size_t i = 1; i < gaps.size(); ++i)
            if (!(gaps[i] <= gaps[i - 1] * (1.0 + 1e-12))) mono = false;
        s.flag("circle/poisson-radial-gap-monotone", mono, gaps.back());
        auto grid = default_grid();
        double slope = std::log(gaps.back() / gaps.front()) / std::log(grid.back() / grid.front());
        s.geq("circle/poisson-radial-gap-slope", slope, 0.9);
    }
    // Radial extension isometry.
    {
        ConcentratingWeight w(BoundaryWeight::constant(1.0, 2), 0.5, 2);
        CircleFunction c1 = CircleFunction::harmonic(1, 1.0);
        double lhs = bulk_lq_norm(radial_extend(c1), w, 2.0);
        double rhs = c1.lq_norm(2.0, &w.alpha);
        s.leq("circle/radial-extend-isometry", std::abs(lhs - rhs), 1e-10);
    }
    // Slobodeckij: constants, homogeneity, Fourier multiplier oracle at q=2.
    {
        double c = slobodeckij_norm(CircleFunction::constant(2.5), 0.5, 2.0);
        s.close("circle/slobodeckij-constant", c, 2.5 * std::sqrt(kTwoPi), 1e-10);
        double n1 = slobodeckij_norm(g, 0.5, 2.0);
        double n2 = slobodeckij_norm(g * 2.0, 0.5, 2.0);
        s.leq("circle/slobodeckij-homogeneity", std::abs(n2 - 2.0 * n1) / n1, 1e-10);

        const double sfrac = 0.5;
        double semi = slobodeckij_seminorm_pow(g, sfrac, 2.0);
        double oracle = 0.0;
        for (int k = 1; k <= g.degree(); ++k) {
            double wk = 2.0 * adaptive_integral(
                                  [&](double tau) {
                                      return (2.0 - 2.0 * std::cos(k * tau)) *
                                             std::pow(2.0 * std::sin(0.5 * tau), -2.0);
                                  },
                                  1e-6, std::numbers::pi, 1e-12, 1e-12);
            oracle += (g.cos_coeff(k) * g.cos_coeff(k) + g.sin_coeff(k) * g.sin_coeff(k)) *
                      std::numbers::pi * wk;
        }
        s.leq("circle/slobodeckij-multiplier-oracle", std::abs(semi - oracle) / oracle, 1e-4);
    }
    // Radial trace gap: definitional identity and zero-trace layer probe.
    {
        ConcentratingWeight w(BoundaryWeight::constant(1.0, 2), 0.5, 2);
        CircleFunction c1 = CircleFunction::harmonic(1, 1.0);
        double via_field = radial_trace_gap(poisson_field(c1), w, 2.0);
        double via_gap = poisson_radial_gap(c1, w, 2.0);
        s.leq("circle/radial-trace-gap-definitional", std::abs(via_field - via_gap) / via_gap,
              1e-10);

        RadialFourierField layer;
        layer.modes.push_back({1, false, [](double r) { return 1.0 - r; }});
        double gap = radial_trace_gap(layer, w, 2.0);
        double expected = std::sqrt(std::numbers::pi * beta_moment(w, 1.0, 2.0));
        s.leq("circle/zero-trace-probe", std::abs(gap - expected) / expected, 1e-8);
    }
    // Ball concentration of weighted moments for u = harmonic extension of cos.
    {
        CircleFunction c1 = CircleFunction::harmonic(1, 1.0);
        RadialFourierField u = poisson_field(c1);
        std::vector<double> errs;
        double worst_signed = 0.0;
        for (double a : default_grid()) {
            ConcentratingWeight wa(BoundaryWeight::constant(1.0, 2), a, 2);
            errs.push_back(std::abs(bulk_q_moment(u, wa, 2.0) - std::numbers::pi));
            worst_signed = std::max(worst_signed, std::abs(bulk_signed_moment(u, wa, 2.0)));
        }
        bool mono = true;
        for (std::size_t i = 1; i < errs.size(); ++i)
            if (!(errs[i] < errs[i - 1])) mono = false;
        s.flag("circle/ball-moment-decreasing", mono, errs.back());
        // |int u^2 mu_a - pi| = 2 pi/(2/a + 2), an O(a) approach to the target.
        s.leq("circle/ball-moment-limit-rate", errs.back() / default_grid().back(),
              1.2 * std::numbers::pi);
        s.leq("circle/ball-moment-signed-vanishes", worst_signed, 1e-10);
    }
}

void map_checks(Suite& s) {
    std::vector<TransferMap> catalog = {TransferMap::identity(2), TransferMap::radial_power(0.5, 2),
                                        TransferMap::radial_power(0.75, 2),
                                        TransferMap::conformal_quadratic(0.25)};

    // Round trip on a grid including boundary points.
    {
        double worst = 0.0;
        for (const auto& map : catalog) {
            for (int i = 0; i < 32; ++i) {
                for (int j = 0; j < 32; ++j) {
                    double r = (i + 1.0) / 32.0;
                    double th = kTwoPi * j / 32.0;
                    Vec2 x{r * std::cos(th), r * std::sin(th)};
                    worst = std::max(worst, (map.inverse(map.forward(x)) - x).norm());
                }
            }
        }
        s.leq("map/round-trip", worst, 1e-10);
    }
    // Mass chain via the change-of-variables identity with f == 1.
    {
        double worst = 0.0;
        for (const auto& map : catalog) {
            for (double a : {0.4, 0.05}) {
                ConcentratingWeight w(BoundaryWeight::fourier(1.0, {0.25}, {0.1}), a, 2);
                CovGaps gaps = change_of_variables_check(map, w, [](Vec2) { return 1.0; });
                worst = std::max({worst, gaps.bulk, gaps.boundary});
            }
        }
        s.leq("map/mass-chain", worst, 1e-6);
    }
    // Polynomial test functions.
    {
        ConcentratingWeight w1(BoundaryWeight::constant(1.0, 2), 0.3, 2);
        CovGaps g1 = change_of_variables_check(TransferMap::radial_power(0.75, 2), w1,
                                               [](Vec2 y) { return y.x(); });
        s.leq("map/cov-linear-radial-power", std::max(g1.bulk, g1.boundary), 1e-6);
        ConcentratingWeight w2(BoundaryWeight::constant(1.0, 2), 0.5, 2);
        CovGaps g2 = change_of_variables_check(TransferMap::conformal_quadratic(0.2), w2,
                                               [](Vec2 y) { return y.squaredNorm(); });
        s.leq("map/cov-quadratic-conformal", std::max(g2.bulk, g2.boundary), 1e-6);
    }
    // Distortion of the radial-power map stays bounded and stabilizes.
    {
        TransferMap map = TransferMap::radial_power(0.5, 2);
        const double p = 1.5;
        auto sample_max = [&](int nsamp) {
            double mx = 0.0;
            for (int i = 1; i <= nsamp; ++i) {
                double r = static_cast<double>(i) / nsamp;
                Vec2 x{r, 0.0};
                double ratio = map.jacobian_matrix(x).operatorNorm() /
                               std::pow(map.jacobian_det(x), 1.0 / p);
                mx = std::max(mx, ratio);
            }
            return mx;
        };
        double m1 = sample_max(500), m2 = sample_max(1000);
        s.leq("map/radial-power-distortion-stable", std::abs(m1 - m2) / m2, 1e-9);
    }
    // Univalence of the conformal boundary up to |c| = 0.45.
    {
        TransferMap map = TransferMap::conformal_quadratic(0.45);
        double prev = map.boundary_angle(0.0);
        double min_step = 1e9;
        const int nsamp = 4096;
        for (int i = 1; i <= nsamp; ++i) {
            double cur = map.boundary_angle(kTwoPi * i / nsamp);
            min_step = std::min(min_step, cur - prev);
            prev = cur;
        }
        s.flag("map/conformal-univalent-boundary", min_step > 0.0, min_step);
    }
    // Boundary volume derivative vs a finite-difference arclength ratio.
    {
        TransferMap map = TransferMap::conformal_quadratic(0.25);
        s.close("map/boundary-derivative-value", map.boundary_volume_derivative(0.0), 2.0 / 3.0,
                1e-14);
        const double h = 1e-5;
        double arc = (map.boundary_point(h) - map.boundary_point(-h)).norm() / (2.0 * h);
        s.close("map/boundary-derivative-fd-arclength", 1.0 / arc,
                map.boundary_volume_derivative(0.0), 1e-6);
    }
    // Unweighted boundary limit: alpha = |1 + 2 c e^{i theta}| makes beta == 1.
    {
        const double c = 0.25;
        BoundaryWeight alpha = BoundaryWeight::custom(
            [c](double theta) {
                return std::abs(1.0 + 2.0 * c * std::exp(std::complex<double>(0.0, theta)));
            },
            "unweighted-limit");
        InducedWeights iw =
            induce_weights(TransferMap::conformal_quadratic(c), ConcentratingWeight(alpha, 0.5, 2));
        double worst = 0.0;
        for (int i = 0; i < 4096; ++i)
            worst = std::max(worst, std::abs(iw.beta_at_angle(kTwoPi * i / 4096) - 1.0));
        s.leq("map/unweighted-boundary-limit", worst, 1e-10);
    }
    // Conformal invariance of the p=2 energy weight; identity weight is 1.
    {
        auto w2 = pullback_energy_weight(TransferMap::conformal_quadratic(0.3), 2.0);
        auto wi = pullback_energy_weight(TransferMap::identity(2), 1.5);
        double worst = 0.0;
        for (int i = 0; i < 64; ++i) {
            double r = (i % 8 + 1) / 8.0, th = kTwoPi * i / 64.0;
            Vec2 x{r * std::cos(th), r * std::sin(th)};
            worst = std::max({worst, std::abs(w2(x) - 1.0), std::abs(wi(x) - 1.0)});
        }
        s.leq("map/pullback-weight-p2-identity", worst, 1e-15);
    }
    // Energy identity for p = 1.5 under the conformal map, u(y) = y_1.
    {
        const double c = 0.25, p = 1.5;
        TransferMap map = TransferMap::conformal_quadratic(c);
        auto omega = pullback_energy_weight(map, p);
        // |grad u| == 1 on the image, so the image-side energy is its area.
        auto radial = graded_unit_nodes();
        const int ntheta = 1024;
        double image_side = 0.0;
        for (int i = 0; i < ntheta; ++i) {
            double big_theta = (i + 0.5) * kTwoPi / ntheta;
            double R = map.image_radius(big_theta);
            double ray = 0.0;
            for (const auto& [t, wt] : radial) ray += wt * (t * R);
            image_side += ray * R;
        }
        image_side *= kTwoPi / ntheta;
        // Disk side: |grad (u o phi)|^p omega_p = |phi'|^2.
        double disk_side = 0.0;
        for (int i = 0; i < ntheta; ++i) {
            double th = i * kTwoPi / ntheta;
            double ray = 0.0;
            for (const auto& [r, wt] : radial) {
                Vec2 x{r * std::cos(th), r * std::sin(th)};
                double grad = std::abs(1.0 + 2.0 * c * std::complex<double>(x.x(), x.y()));
                ray += wt * std::pow(grad, p) * omega(x) * r;
            }
            disk_side += ray;
        }
        disk_side *= kTwoPi / ntheta;
        s.leq("map/pullback-energy-identity", std::abs(image_side - disk_side), 1e-6);
    }
}

}  // namespace

LemmaReport run_lemma_checks() {
    Suite s;
    weight_checks(s);
    circle_checks(s);
    map_checks(s);
    LemmaReport rep;
    rep.checks = std::move(s.checks);
    rep.all_passed = true;
    for (const auto& c : rep.checks)
        if (!c.pass) rep.all_passed = false;
    return rep;
}

std::string LemmaReport::text() const {
    std::string out;
    char buf[256];
    for (const auto& c : checks) {
        std::snprintf(buf, sizeof(buf), "[%s] %-45s observed=%.6g expected=%.6g tol=%.3g\n",
                      c.pass ? "PASS" : "FAIL", c.name.c_str(), c.observed, c.expected,
                      c.tolerance);
        out += buf;
    }
    out += all_passed ? "all lemma checks passed\n" : "LEMMA CHECK FAILURES PRESENT\n";
    return out;
}

nlohmann::ordered_json LemmaReport::to_json() const {
    nlohmann::ordered_json j;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& c : checks)
        arr.push_back({{"name", c.name},
                       {"pass", c.pass},
                       {"observed", c.observed},
                       {"expected", c.expected},
                       {"tolerance", c.tolerance}});
    j["checks"] = arr;
    j["all_passed"] = all_passed;
    j["version"] = version_string();
    return j;
}

}  // namespace stek
