#include "steklimit/quadrature.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace stek {

namespace {

GaussRule compute_gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one point");
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Chebyshev guess, then Newton on P_n.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            if (n == 1) { p1 = x; }
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double pn = (n == 1) ? x : p1;
            double pm = (n == 1) ? 1.0 : p0;
            pp = n * (x * pn - pm) / (x * x - 1.0);
            double dx = pn / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int npoints) {
    static std::map<int, GaussRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(npoints);
    if (it == cache.end()) it = cache.emplace(npoints, compute_gauss_legendre(npoints)).first;
    return it->second;
}

double gauss_integrate(const std::function<double(double)>& f, double a, double b, int npoints) {
    const GaussRule& g = gauss_legendre(npoints);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double sum = 0.0;
    for (int i = 0; i < npoints; ++i) sum += g.weights[i] * f(mid + half * g.nodes[i]);
    return sum * half;
}

double graded_unit_integral(const std::function<double(double)>& f, int depth, int npoints) {
    double total = gauss_integrate(f, 0.0, 0.5, npoints);
    double left = 0.5;
    for (int j = 2; j <= depth; ++j) {
        double right = 1.0 - std::ldexp(1.0, -j);
        total += gauss_integrate(f, left, right, npoints);
        left = right;
    }
    total += gauss_integrate(f, left, 1.0, npoints);
    return total;
}

std::vector<std::pair<double, double>> graded_unit_nodes(int depth, int npoints) {
    const GaussRule& g = gauss_legendre(npoints);
    std::vector<std::pair<double, double>> out;
    out.reserve(static_cast<std::size_t>(depth + 1) * npoints);
    auto push_panel = [&](double a, double b) {
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (int i = 0; i < npoints; ++i)
            out.emplace_back(mid + half * g.nodes[i], half * g.weights[i]);
    };
    push_panel(0.0, 0.5);
    double left = 0.5;
    for (int j = 2; j <= depth; ++j) {
        double right = 1.0 - std::ldexp(1.0, -j);
        push_panel(left, right);
        left = right;
    }
    push_panel(left, 1.0);
    return out;
}

namespace {

// Kronrod-15 nodes (nonnegative half) with Gauss-7 embedded at the odd indices.
constexpr double kK15Nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
constexpr double kK15Weights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double kG7Weights[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct GkEstimate {
    double value;
    double error;
};

GkEstimate gk15(const std::function<double(double)>& f, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double fk[15];
    for (int i = 0; i < 7; ++i) {
        fk[i] = f(mid - half * kK15Nodes[i]);
        fk[14 - i] = f(mid + half * kK15Nodes[i]);
    }
    fk[7] = f(mid);
    double k15 = 0.0;
    for (int i = 0; i < 7; ++i) k15 += kK15Weights[i] * (fk[i] + fk[14 - i]);
    k15 += kK15Weights[7] * fk[7];
    double g7 = kG7Weights[3] * fk[7];
    for (int i = 0; i < 3; ++i) g7 += kG7Weights[i] * (fk[2 * i + 1] + fk[13 - 2 * i]);
    return {k15 * half, std::abs(k15 - g7) * half};
}

double adapt(const std::function<double(double)>& f, double a, double b, double tol, int depth,
             int max_depth) {
    GkEstimate e = gk15(f, a, b);
    // Roundoff floor: once the panel estimate is at machine level, further
    // subdivision cannot help and would blow the recursion tree up.
    const double floor_tol = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(e.value) +
                             1e-305;
    if (e.error <= std::max(tol, floor_tol) || depth >= max_depth) return e.value;
    const double mid = 0.5 * (a + b);
    return adapt(f, a, mid, 0.5 * tol, depth + 1, max_depth) +
           adapt(f, mid, b, 0.5 * tol, depth + 1, max_depth);
}

}  // namespace

double adaptive_integral(const std::function<double(double)>& f, double a, double b,
                         double abs_tol, double rel_tol, int max_depth) {
    GkEstimate whole = gk15(f, a, b);
    double tol = std::max(abs_tol, rel_tol * std::abs(whole.value));
    if (whole.error <= tol) return whole.value;
    return adapt(f, a, b, tol, 0, max_depth);
}

double periodic_integral(const std::function<double(double)>& f, int n) {
    const double h = 2.0 * std::numbers::pi / n;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += f(i * h);
    return sum * h;
}

const TriangleRule& triangle_rule_degree4() {
    static const TriangleRule rule = [] {
        TriangleRule r;
        const double a1 = 0.445948490915965, w1 = 0.223381589678011;
        const double a2 = 0.091576213509771, w2 = 0.109951743655322;
        r.bary = {{{a1, a1, 1 - 2 * a1},
                   {a1, 1 - 2 * a1, a1},
                   {1 - 2 * a1, a1, a1},
                   {a2, a2, 1 - 2 * a2},
                   {a2, 1 - 2 * a2, a2},
                   {1 - 2 * a2, a2, a2}}};
        r.weights = {w1, w1, w1, w2, w2, w2};
        return r;
    }();
    return rule;
}

}  // namespace stek
