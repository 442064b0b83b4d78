#include "steklimit/eigensolver.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <random>

namespace stek {

namespace {

const WeightedNormForm& norm_form(const AssembledForms& forms, ProblemKind which) {
    return which == ProblemKind::Neumann ? forms.bulk_norm : forms.boundary_norm;
}

void fix_sign(Eigen::VectorXd& u) {
    int idx = 0;
    double best = 0.0;
    for (int i = 0; i < u.size(); ++i)
        if (std::abs(u[i]) > best) {
            best = std::abs(u[i]);
            idx = i;
        }
    if (u[idx] < 0.0) u = -u;
}

// Subtract the q-center and normalize the L^q(w)-norm to one.
void center_normalize(Eigen::VectorXd& u, const WeightedNormForm& w, double q) {
    if (u.maxCoeff() - u.minCoeff() <= 0.0)
        throw std::invalid_argument("field is constant on the weight support");
    double c = w.qcenter(u, q);
    u.array() -= c;
    double n = w.norm_q_pow(u, 0.0, q);
    if (!(n > 0.0)) throw std::invalid_argument("field is constant on the weight support");
    u /= std::pow(n, 1.0 / q);
}

double wp_norm(const AssembledForms& forms, const Eigen::VectorXd& v, double p) {
    double e = forms.plain_energy.value(v, p);
    double l = forms.plain_bulk.norm_q_pow(v, 0.0, p);
    return std::pow(e + l, 1.0 / p);
}

}  // namespace

double q_center(const DiscreteField& u, const WeightedNormForm& w, double q) {
    return w.qcenter(u.values, q);
}

double quotient(const AssembledForms& forms, ProblemKind which, const DiscreteField& u, double p,
                double q) {
    const WeightedNormForm& w = norm_form(forms, which);
    if (u.values.maxCoeff() - u.values.minCoeff() <= 0.0)
        throw std::invalid_argument("quotient: constant field (zero denominator after centering)");
    double c = w.qcenter(u.values, q);
    double n = w.norm_q_pow(u.values, c, q);
    if (!(n > 0.0))
        throw std::invalid_argument("quotient: constant field (zero denominator after centering)");
    return forms.energy.value(u.values, p) / std::pow(n, p / q);
}

double weak_residual(const EigenResult& result, const AssembledForms& forms, double p, double q,
                     ProblemKind which) {
    const WeightedNormForm& w = norm_form(forms, which);
    const Eigen::VectorXd& u = result.minimizer.values;
    const double scale = result.lambda * std::pow(result.normalization, (p - q) / q);
    const int nv = static_cast<int>(u.size());
    double worst = 0.0;
    for (int trial = 0; trial < 32; ++trial) {
        std::mt19937_64 rng(0x5eedULL + trial);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        Eigen::VectorXd v(nv);
        for (int i = 0; i < nv; ++i) v[i] = dist(rng);
        double num =
            std::abs(forms.energy.flux_pairing(u, v, p) - scale * w.phi_pairing(u, v, q));
        worst = std::max(worst, num / wp_norm(forms, v, p));
    }
    return worst;
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

EigenResult solve_linear_neumann(const AssembledForms& forms, const SolveOptions& opts) {
    const SparseMat& K = forms.stiffness;
    const SparseMat& M = forms.bulk_mass;
    const int nv = static_cast<int>(K.rows());
    const VectorXd ones = VectorXd::Ones(nv);
    const VectorXd m_ones = M * ones;
    const double ones_mass = ones.dot(m_ones);
    if (!(ones_mass > 0.0)) throw std::domain_error("solve_linear: weight mass must be positive");

    // Shift sized from a coordinate field's Rayleigh quotient; keeps K + s M
    // positive definite and the spectral transform well separated.
    VectorXd probe = forms.mesh->vertices.col(0);
    probe.array() -= probe.dot(m_ones) / ones_mass;
    const double rayleigh = probe.dot(K * probe) / probe.dot(M * probe);
    const double shift = 1e-3 * std::max(rayleigh, 1e-12);

    SparseMat A = K + shift * M;
    Eigen::SimplicialLDLT<SparseMat> ldlt(A);
    if (ldlt.info() != Eigen::Success)
        throw SolverError("solve_linear: stiffness factorization failed on the deflated space");

    const int m = std::min(opts.subspace_dim, nv - 1);
    MatrixXd X(nv, m);
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < nv; ++i) X(i, j) = dist(rng);

    auto deflate = [&](Eigen::Ref<VectorXd> v) { v -= (v.dot(m_ones) / ones_mass) * ones; };

    VectorXd ritz;
    MatrixXd V;
    int iters = 0;
    bool converged = false;
    for (int it = 0; it < opts.linear_max_iterations && !converged; ++it) {
        ++iters;
        // Inverse iteration step in the M inner product with constants removed.
        for (int j = 0; j < m; ++j) {
            VectorXd col = X.col(j);
            deflate(col);
            X.col(j) = ldlt.solve(M * col);
            deflate(X.col(j));
        }
        // M-orthonormalize (modified Gram-Schmidt).
        for (int j = 0; j < m; ++j) {
            VectorXd mxj = M * X.col(j);
            for (int k = 0; k < j; ++k) X.col(j) -= (X.col(k).dot(mxj)) * X.col(k);
            mxj = M * X.col(j);
            double nn = std::sqrt(std::max(X.col(j).dot(mxj), 0.0));
            if (nn < 1e-300) {
                for (int i = 0; i < nv; ++i) X(i, j) = dist(rng);
                deflate(X.col(j));
                nn = std::sqrt(X.col(j).dot(M * X.col(j)));
            }
            X.col(j) /= nn;
        }
        // Rayleigh-Ritz.
        MatrixXd Kr = X.transpose() * (K * X).eval();
        Eigen::SelfAdjointEigenSolver<MatrixXd> small(0.5 * (Kr + Kr.transpose()));
        ritz = small.eigenvalues();
        V = X * small.eigenvectors();
        // Residual check on the three leading pairs.
        converged = true;
        for (int j = 0; j < std::min(3, m); ++j) {
            VectorXd r = K * V.col(j) - ritz[j] * (M * V.col(j));
            double denom = (K * V.col(j)).norm() + std::abs(ritz[j]) * (M * V.col(j)).norm();
            if (r.norm() > opts.linear_tol * std::max(denom, 1e-30)) {
                converged = false;
                break;
            }
        }
        X = V;
    }
    if (!converged) throw SolverError("solve_linear: Neumann iteration did not converge");

    EigenResult res;
    res.lambda = ritz[0];
    res.iterations = iters;
    for (int j = 0; j < std::min<int>(m, 6); ++j) res.spectrum_head.push_back(ritz[j]);

    VectorXd u = V.col(0);
    fix_sign(u);
    center_normalize(u, forms.bulk_norm, 2.0);
    res.minimizer = DiscreteField(forms.mesh, u);
    if (m > 1 && ritz[1] - ritz[0] < opts.degeneracy_gap * std::abs(ritz[0])) {
        VectorXd u2 = V.col(1);
        fix_sign(u2);
        center_normalize(u2, forms.bulk_norm, 2.0);
        res.degenerate_pair = DiscreteField(forms.mesh, u2);
    }
    return res;
}

EigenResult solve_linear_steklov(const AssembledForms& forms, const SolveOptions& opts) {
    const SparseMat& K = forms.stiffness;
    const DiskMesh& mesh = *forms.mesh;
    const int nv = static_cast<int>(K.rows());
    const int nb = static_cast<int>(mesh.boundary_vertices.size());
    if (nb < 3) throw std::domain_error("solve_linear: mesh has no boundary ring");
    if (!(forms.boundary_norm.mass() > 0.0))
        throw std::domain_error("solve_linear: boundary weight mass must be positive");

    std::vector<int> to_local(nv, -1);
    for (int j = 0; j < nb; ++j) to_local[mesh.boundary_vertices[j]] = j;
    std::vector<int> interior;
    interior.reserve(nv - nb);
    for (int i = 0; i < nv; ++i)
        if (to_local[i] < 0) interior.push_back(i);
    std::vector<int> int_local(nv, -1);
    for (std::size_t j = 0; j < interior.size(); ++j) int_local[interior[j]] = static_cast<int>(j);
    const int ni = static_cast<int>(interior.size());

    std::vector<Eigen::Triplet<double>> tii, tib;
    MatrixXd Kbb = MatrixXd::Zero(nb, nb);
    for (int col = 0; col < K.outerSize(); ++col) {
        for (SparseMat::InnerIterator it(K, col); it; ++it) {
            int r = static_cast<int>(it.row()), c = col;
            bool rb = to_local[r] >= 0, cb = to_local[c] >= 0;
            if (!rb && !cb)
                tii.emplace_back(int_local[r], int_local[c], it.value());
            else if (!rb && cb)
                tib.emplace_back(int_local[r], to_local[c], it.value());
            else if (rb && cb)
                Kbb(to_local[r], to_local[c]) += it.value();
        }
    }
    SparseMat Kii(ni, ni), Kib(ni, nb);
    Kii.setFromTriplets(tii.begin(), tii.end());
    Kib.setFromTriplets(tib.begin(), tib.end());

    Eigen::SimplicialLDLT<SparseMat> ldlt(Kii);
    if (ldlt.info() != Eigen::Success)
        throw SolverError("solve_linear: interior stiffness factorization failed");

    // X = Kii^{-1} Kib, solved in column blocks to bound memory.
    MatrixXd X(ni, nb);
    const int block = 64;
    for (int c0 = 0; c0 < nb; c0 += block) {
        int nc = std::min(block, nb - c0);
        MatrixXd rhs = MatrixXd(Kib.middleCols(c0, nc));
        X.middleCols(c0, nc) = ldlt.solve(rhs);
    }
    MatrixXd S = Kbb - MatrixXd(Kib.transpose()) * X;
    S = 0.5 * (S + S.transpose()).eval();

    MatrixXd B = MatrixXd::Zero(nb, nb);
    for (int col = 0; col < forms.boundary_mass.outerSize(); ++col)
        for (SparseMat::InnerIterator it(forms.boundary_mass, col); it; ++it) {
            int lr = to_local[it.row()], lc = to_local[col];
            if (lr >= 0 && lc >= 0) B(lr, lc) += it.value();
        }

    Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> ges(S, B);
    if (ges.info() != Eigen::Success)
        throw SolverError("solve_linear: boundary eigenproblem failed (is the weight positive?)");
    VectorXd evals = ges.eigenvalues();

    auto extend = [&](const VectorXd& ub) {
        VectorXd u(nv);
        VectorXd ui = -ldlt.solve((Kib * ub).eval());
        for (int j = 0; j < nb; ++j) u[mesh.boundary_vertices[j]] = ub[j];
        for (int j = 0; j < ni; ++j) u[interior[j]] = ui[j];
        return u;
    };

    EigenResult res;
    res.lambda = evals[1];  // index 0 is the constant mode (zero)
    res.iterations = 1;
    for (int j = 1; j < std::min<int>(nb, 7); ++j) res.spectrum_head.push_back(evals[j]);

    VectorXd u = extend(ges.eigenvectors().col(1));
    fix_sign(u);
    center_normalize(u, forms.boundary_norm, 2.0);
    res.minimizer = DiscreteField(forms.mesh, u);
    if (nb > 2 && evals[2] - evals[1] < opts.degeneracy_gap * std::abs(evals[1])) {
        VectorXd u2 = extend(ges.eigenvectors().col(2));
        fix_sign(u2);
        center_normalize(u2, forms.boundary_norm, 2.0);
        res.degenerate_pair = DiscreteField(forms.mesh, u2);
    }
    return res;
}

}  // namespace

EigenResult solve_linear(const AssembledForms& forms, ProblemKind which,
                         const SolveOptions& opts) {
    EigenResult res = which == ProblemKind::Neumann ? solve_linear_neumann(forms, opts)
                                                    : solve_linear_steklov(forms, opts);
    if (!(res.lambda > 0.0)) throw SolverError("solve_linear: nonpositive first eigenvalue");
    res.sharp_constant = std::pow(res.lambda, -0.5);
    res.normalization = norm_form(forms, which).norm_q_pow(res.minimizer.values, 0.0, 2.0);
    res.weak_residual = weak_residual(res, forms, 2.0, 2.0, which);
    return res;
}

namespace {

struct DescentOutcome {
    VectorXd u;
    double quotient = 0.0;
    long iterations = 0;
    bool converged = false;
    std::vector<double> trace;
};

class QuotientDescent {
public:
    QuotientDescent(const AssembledForms& forms, ProblemKind which, double p, double q,
                    const SolveOptions& opts)
        : forms_(forms),
          w_(norm_form(forms, which)),
          p_(p),
          q_(q),
          opts_(opts),
          prec_(SparseMat(forms.stiffness + forms.plain_mass)) {
        if (prec_.info() != Eigen::Success)
            throw SolverError("minimize_quotient: preconditioner factorization failed");
    }

    double quotient_of(const VectorXd& u) const {
        double c = w_.qcenter(u, q_);
        double n = w_.norm_q_pow(u, c, q_);
        if (!(n > 0.0)) return std::numeric_limits<double>::infinity();
        return forms_.energy.value(u, p_) / std::pow(n, p_ / q_);
    }

    DescentOutcome run(VectorXd u, long budget) const {
        DescentOutcome out;
        center_normalize(u, w_, q_);
        double Q = quotient_of(u);
        out.trace.push_back(Q);
        double t = 1.0;
        int stall = 0;
        int polish = 0;
        VectorXd grad(u.size()), dir(u.size());
        for (long it = 0; it < budget; ++it) {
            ++out.iterations;
            // Gradient of E/N^{p/q} at the normalized point (N=1): the
            // q-center is recomputed so the envelope term is exact.
            double c = w_.qcenter(u, q_);
            double E = forms_.energy.value(u, p_);
            grad.setZero();
            forms_.energy.add_value_gradient(u, p_, 1.0, grad);
            w_.add_norm_q_gradient(u, c, q_, -(p_ / q_) * E, grad);
            dir = -prec_.solve(grad);
            double gd = grad.dot(dir);
            if (!(gd < 0.0) || std::sqrt(std::abs(gd)) <= opts_.grad_tol * (1.0 + Q)) {
                out.converged = true;
                break;
            }
            if (stall >= opts_.stall_steps) {
                // Quotient has flattened; stop once the gradient agrees or the
                // polish budget runs out.
                if (std::sqrt(std::abs(gd)) <= opts_.polish_grad_tol * (1.0 + Q) ||
                    ++polish > opts_.polish_budget) {
                    out.converged = true;
                    break;
                }
            }
            // Armijo backtracking on the scale-invariant quotient.
            double step = std::min(4.0 * t, 1e3);
            bool accepted = false;
            for (int bt = 0; bt < 60; ++bt) {
                double Qtrial = quotient_of(u + step * dir);
                if (Qtrial <= Q + 1e-4 * step * gd) {
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted) {
                out.converged = true;  // step-size floor: numerically stationary
                break;
            }
            t = step;
            u += step * dir;
            center_normalize(u, w_, q_);
            double Qnew = quotient_of(u);
            out.trace.push_back(Qnew);
            stall = (Q - Qnew) < opts_.stall_tol * std::abs(Q) ? stall + 1 : 0;
            Q = Qnew;
        }
        out.u = std::move(u);
        out.quotient = Q;
        return out;
    }

private:
    const AssembledForms& forms_;
    const WeightedNormForm& w_;
    double p_, q_;
    const SolveOptions& opts_;
    Eigen::SimplicialLDLT<SparseMat> prec_;
};

}  // namespace

EigenResult minimize_quotient(const AssembledForms& forms, ProblemKind which, double p, double q,
                              const SolveOptions& opts, const DiscreteField* init) {
    if (!(p > 1.0) || !(q > 1.0))
        throw std::domain_error("minimize_quotient: exponents must exceed 1");
    const int nv = forms.mesh->vertex_count();
    const WeightedNormForm& w = norm_form(forms, which);
    if (!(w.mass() > 0.0)) throw std::domain_error("minimize_quotient: weight mass must be positive");

    std::vector<VectorXd> seeds;
    if (init) {
        if (init->values.size() != nv)
            throw std::invalid_argument("minimize_quotient: init field size mismatch");
        seeds.push_back(init->values);
    }
    // Two coordinate-like fields and two fixed-seed random fields.
    std::vector<VectorXd> canonical;
    canonical.push_back(forms.mesh->vertices.col(0));
    canonical.push_back(forms.mesh->vertices.col(1));
    for (int r = 0; r < 2; ++r) {
        std::mt19937_64 rng(opts.seed + r);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        VectorXd v(nv);
        for (int i = 0; i < nv; ++i) v[i] = dist(rng);
        canonical.push_back(std::move(v));
    }
    for (int r = 0; r < std::min<int>(opts.restarts, canonical.size()); ++r)
        seeds.push_back(canonical[r]);

    QuotientDescent descent(forms, which, p, q, opts);
    const long budget = std::max<long>(1, opts.max_iterations / std::max<std::size_t>(seeds.size(), 1));

    DescentOutcome best;
    long total_iters = 0;
    bool any = false;
    for (const auto& seed : seeds) {
        DescentOutcome o = descent.run(seed, budget);
        total_iters += o.iterations;
        if (o.converged && (!any || o.quotient < best.quotient)) {
            best = std::move(o);
            any = true;
        }
    }
    if (!any)
        throw SolverError("minimize_quotient: all restarts failed to reach tolerance within budget");

    fix_sign(best.u);
    center_normalize(best.u, w, q);
    EigenResult res;
    res.lambda = descent.quotient_of(best.u);
    res.minimizer = DiscreteField(forms.mesh, best.u);
    res.sharp_constant = std::pow(res.lambda, -1.0 / p);
    res.iterations = total_iters;
    res.normalization = w.norm_q_pow(best.u, 0.0, q);
    res.quotient_trace = std::move(best.trace);
    res.weak_residual = weak_residual(res, forms, p, q, which);
    return res;
}

}  // namespace stek
