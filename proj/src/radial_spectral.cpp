#include "steklimit/radial_spectral.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <stdexcept>

#include "steklimit/quadrature.hpp"

namespace stek {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Eigen::VectorXd;

double mode_kappa_term(int n, int k) {
    return n == 2 ? static_cast<double>(k) * k : static_cast<double>(k) * (k + 1);
}

void require_radial_setup(int n, int k, const ConcentratingWeight& w) {
    if (n != 2 && n != 3) throw std::domain_error("radial oracle: n must be 2 or 3");
    if (k < 1) throw std::domain_error("radial oracle: mode index must be >= 1");
    if (!w.alpha.is_constant())
        throw std::domain_error("radial oracle: requires a constant boundary profile");
    if (w.n != n) throw std::invalid_argument("radial oracle: dimension mismatch");
}

struct ModeMatrices {
    SpMat A;  // energy form, nodes 1..N (f(0)=0 imposed)
    SpMat M;  // rho_a-weighted mass form
};

// P1 assembly of the 1D mode forms on the graded grid, GL-4 per cell.
ModeMatrices assemble_mode(int n, int k, const ConcentratingWeight& w, const RadialGrid& grid) {
    const int N = grid.cells();
    const double kap = mode_kappa_term(n, k);
    std::vector<Eigen::Triplet<double>> ta, tm;
    const GaussRule& gl = gauss_legendre(4);
    for (int c = 0; c < N; ++c) {
        const double r0 = grid.r[c], r1 = grid.r[c + 1];
        const double h = r1 - r0;
        double a00 = 0, a01 = 0, a11 = 0, m00 = 0, m01 = 0, m11 = 0;
        for (std::size_t g = 0; g < gl.nodes.size(); ++g) {
            const double r = 0.5 * (r0 + r1) + 0.5 * h * gl.nodes[g];
            const double wq = 0.5 * h * gl.weights[g];
            const double rn1 = std::pow(r, n - 1);
            const double phi1 = (r - r0) / h, phi0 = 1.0 - phi1;
            const double dphi = 1.0 / h;
            const double grad_fac = wq * rn1 * dphi * dphi;
            a00 += grad_fac;
            a01 -= grad_fac;
            a11 += grad_fac;
            const double ang = r > 0.0 ? wq * kap * rn1 / (r * r) : 0.0;
            a00 += ang * phi0 * phi0;
            a01 += ang * phi0 * phi1;
            a11 += ang * phi1 * phi1;
            const double mw = wq * w.rho(r) * rn1;
            m00 += mw * phi0 * phi0;
            m01 += mw * phi0 * phi1;
            m11 += mw * phi1 * phi1;
        }
        // Global indices shifted by the f(0)=0 constraint: node i -> row i-1.
        auto put = [&](std::vector<Eigen::Triplet<double>>& t, int i, int j, double v) {
            if (i >= 1 && j >= 1) t.emplace_back(i - 1, j - 1, v);
        };
        put(ta, c, c, a00);
        put(ta, c, c + 1, a01);
        put(ta, c + 1, c, a01);
        put(ta, c + 1, c + 1, a11);
        put(tm, c, c, m00);
        put(tm, c, c + 1, m01);
        put(tm, c + 1, c, m01);
        put(tm, c + 1, c + 1, m11);
    }
    ModeMatrices out;
    out.A.resize(N, N);
    out.M.resize(N, N);
    out.A.setFromTriplets(ta.begin(), ta.end());
    out.M.setFromTriplets(tm.begin(), tm.end());
    return out;
}

// Smallest eigenvalue of A f = lambda M f (A SPD) by inverse subspace
// iteration with a small Ritz block.
double smallest_generalized(const ModeMatrices& mats, VectorXd* evec = nullptr) {
    const int N = static_cast<int>(mats.A.rows());
    Eigen::SimplicialLDLT<SpMat> ldlt(mats.A);
    if (ldlt.info() != Eigen::Success)
        throw std::runtime_error("radial oracle: 1D factorization failed");
    const int m = std::min(3, N);
    // Start vectors must carry mass where the concentrating density lives:
    // the constant vector plus spikes at the outermost nodes.
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(N, m);
    X.col(0).setOnes();
    for (int j = 1; j < m; ++j) X(N - 1 - (j - 1), j) = 1.0;
    double lambda = 0.0;
    for (int it = 0; it < 200; ++it) {
        for (int j = 0; j < m; ++j) X.col(j) = ldlt.solve((mats.M * X.col(j)).eval());
        // M-orthonormalize.
        for (int j = 0; j < m; ++j) {
            for (int kcol = 0; kcol < j; ++kcol)
                X.col(j) -= X.col(kcol).dot(mats.M * X.col(j)) * X.col(kcol);
            double nn = std::sqrt(X.col(j).dot(mats.M * X.col(j)));
            if (!(nn > 1e-150)) {  // re-seed a column that lost all weighted mass
                X.col(j).setZero();
                X(N - 1, j) = 1.0;
                X.col(j) = ldlt.solve((mats.M * X.col(j)).eval());
                nn = std::sqrt(X.col(j).dot(mats.M * X.col(j)));
            }
            X.col(j) /= nn;
        }
        Eigen::MatrixXd Ar = X.transpose() * (mats.A * X).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(0.5 * (Ar + Ar.transpose()));
        Eigen::MatrixXd V = X * small.eigenvectors();
        double next = small.eigenvalues()[0];
        VectorXd r = mats.A * V.col(0) - next * (mats.M * V.col(0));
        X = V;
        bool done = r.norm() <= 1e-13 * ((mats.A * V.col(0)).norm() + 1e-300);
        lambda = next;
        if (done) break;
    }
    if (evec) *evec = X.col(0);
    return lambda;
}

}  // namespace

double RadialGrid::h_min() const {
    double m = 1.0;
    for (std::size_t i = 1; i < r.size(); ++i) m = std::min(m, r[i] - r[i - 1]);
    return m;
}

RadialGrid make_radial_grid_kappa(int cells, double kappa) {
    if (cells < 4) throw std::invalid_argument("radial grid: too few cells");
    RadialGrid g;
    g.kappa = kappa;
    g.r.resize(cells + 1);
    for (int i = 0; i <= cells; ++i) {
        double t = static_cast<double>(i) / cells;
        g.r[i] = 1.0 - std::pow(1.0 - t, kappa);
    }
    g.r.front() = 0.0;
    g.r.back() = 1.0;
    return g;
}

RadialGrid make_radial_grid(int cells, double a, int n) {
    const double target = a / (2.0 * n);
    double kappa = std::max(1.0, std::log(1.0 / target) / std::log(static_cast<double>(cells)));
    return make_radial_grid_kappa(cells, kappa);
}

double mode_neumann_on_grid(int n, int k, const ConcentratingWeight& w, const RadialGrid& grid) {
    require_radial_setup(n, k, w);
    if (grid.h_min() > w.a / (2.0 * n) + 1e-15)
        throw std::domain_error("radial oracle: grid too coarse for the boundary layer");
    ModeMatrices mats = assemble_mode(n, k, w, grid);
    return smallest_generalized(mats);
}

ModeEigen mode_neumann(int n, int k, const ConcentratingWeight& w, int cells) {
    require_radial_setup(n, k, w);
    RadialGrid coarse = make_radial_grid(cells, w.a, n);
    RadialGrid fine = make_radial_grid_kappa(2 * cells, coarse.kappa);
    ModeEigen out;
    out.coarse = mode_neumann_on_grid(n, k, w, coarse);
    out.fine = mode_neumann_on_grid(n, k, w, fine);
    out.value = out.fine + (out.fine - out.coarse) / 3.0;  // O(h^2) Richardson
    out.refine_delta = std::abs(out.fine - out.coarse);
    return out;
}

std::vector<double> mode_neumann_eigenfunction(int n, int k, const ConcentratingWeight& w,
                                               const RadialGrid& grid, double* lambda_out) {
    require_radial_setup(n, k, w);
    ModeMatrices mats = assemble_mode(n, k, w, grid);
    VectorXd f;
    double lambda = smallest_generalized(mats, &f);
    // normalize the weighted mass to 1, boundary value positive
    double mass = f.dot(mats.M * f);
    f /= std::sqrt(mass);
    if (f[f.size() - 1] < 0.0) f = -f;
    if (lambda_out) *lambda_out = lambda;
    std::vector<double> out(grid.r.size(), 0.0);
    for (int i = 1; i < static_cast<int>(grid.r.size()); ++i) out[i] = f[i - 1];
    return out;
}

SteklovMode mode_steklov(int n, int k, int cells) {
    if (n != 2 && n != 3) throw std::domain_error("radial oracle: n must be 2 or 3");
    if (k < 1) throw std::domain_error("radial oracle: mode index must be >= 1");
    SteklovMode out;
    out.exact = static_cast<double>(k);
    // Discrete quotient: minimize f^T A f with f(1)=1; the minimum equals
    // 1 / (A^{-1} e_N)_N.
    RadialGrid grid = make_radial_grid_kappa(cells, 1.0);
    ConcentratingWeight unit(BoundaryWeight::constant(1.0, n), 1.0, n);
    ModeMatrices mats = assemble_mode(n, k, unit, grid);
    Eigen::SimplicialLDLT<SpMat> ldlt(mats.A);
    if (ldlt.info() != Eigen::Success)
        throw std::runtime_error("radial oracle: 1D factorization failed");
    VectorXd e = VectorXd::Zero(mats.A.rows());
    e[mats.A.rows() - 1] = 1.0;
    VectorXd x = ldlt.solve(e);
    out.discrete = 1.0 / x[mats.A.rows() - 1];
    return out;
}

double mode_minimizer_distance(int n, int k, const ConcentratingWeight& w, int cells) {
    require_radial_setup(n, k, w);
    RadialGrid grid = make_radial_grid(cells, w.a, n);
    std::vector<double> f = mode_neumann_eigenfunction(n, k, w, grid);
    const GaussRule& gl = gauss_legendre(4);
    double acc = 0.0;
    for (int c = 0; c < grid.cells(); ++c) {
        const double r0 = grid.r[c], r1 = grid.r[c + 1], h = r1 - r0;
        const double df = (f[c + 1] - f[c]) / h;
        for (std::size_t g = 0; g < gl.nodes.size(); ++g) {
            const double r = 0.5 * (r0 + r1) + 0.5 * h * gl.nodes[g];
            const double wq = 0.5 * h * gl.weights[g];
            const double rn1 = std::pow(r, n - 1);
            const double fa = f[c] + df * (r - r0);
            const double diff = fa - std::pow(r, k);
            const double ddiff = df - k * std::pow(r, k - 1);
            acc += wq * rn1 * (ddiff * ddiff + diff * diff);
        }
    }
    return std::sqrt(acc);
}

double mode_neumann_shooting(int n, int k, const ConcentratingWeight& w, double lambda_hint,
                             int steps) {
    require_radial_setup(n, k, w);
    const double kap = mode_kappa_term(n, k);
    // y = [f, F] with F = r^{n-1} f'; F' = kap r^{n-3} f - lambda rho r^{n-1} f.
    auto rhs = [&](double r, double f, double F, double lam, double& df, double& dF) {
        df = F / std::pow(r, n - 1);
        dF = kap * std::pow(r, n - 3) * f - lam * w.rho(r) * std::pow(r, n - 1) * f;
    };
    // Graded nodes matching the layer, starting from the series point r=eps.
    const double eps = 1e-5;
    const double kappa = std::max(1.0, std::log(2.0 * n / w.a) / std::log(static_cast<double>(steps)));
    std::vector<double> nodes(steps + 1);
    for (int i = 0; i <= steps; ++i) {
        double t = static_cast<double>(i) / steps;
        nodes[i] = eps + (1.0 - eps) * (1.0 - std::pow(1.0 - t, kappa));
    }
    nodes.back() = 1.0;
    const int m = k;  // leading behavior f ~ r^m near 0 (m(m+n-2) = kap)
    auto boundary_slope = [&](double lam) {
        double f = std::pow(eps, m);
        double F = m * std::pow(eps, m + n - 2);
        for (int i = 0; i < steps; ++i) {
            const double h = nodes[i + 1] - nodes[i];
            const double r = nodes[i];
            double k1f, k1F, k2f, k2F, k3f, k3F, k4f, k4F;
            rhs(r, f, F, lam, k1f, k1F);
            rhs(r + 0.5 * h, f + 0.5 * h * k1f, F + 0.5 * h * k1F, lam, k2f, k2F);
            rhs(r + 0.5 * h, f + 0.5 * h * k2f, F + 0.5 * h * k2F, lam, k3f, k3F);
            rhs(r + h, f + h * k3f, F + h * k3F, lam, k4f, k4F);
            f += h / 6.0 * (k1f + 2 * k2f + 2 * k3f + k4f);
            F += h / 6.0 * (k1F + 2 * k2F + 2 * k3F + k4F);
            // keep magnitudes sane; only the sign of F(1) matters
            double scale = std::max(std::abs(f), std::abs(F));
            if (scale > 1e100) {
                f /= scale;
                F /= scale;
            }
        }
        return F;
    };
    double lo = 0.2 * lambda_hint, hi = 2.5 * lambda_hint;
    double flo = boundary_slope(lo), fhi = boundary_slope(hi);
    int guard = 0;
    while (flo * fhi > 0.0 && guard++ < 60) {
        lo *= 0.7;
        hi *= 1.3;
        flo = boundary_slope(lo);
        fhi = boundary_slope(hi);
    }
    if (flo * fhi > 0.0) throw std::runtime_error("shooting: failed to bracket the eigenvalue");
    for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = boundary_slope(mid);
        if (flo * fm <= 0.0) {
            hi = mid;
            fhi = fm;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace stek
