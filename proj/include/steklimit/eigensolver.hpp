#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "steklimit/forms.hpp"

namespace stek {

enum class ProblemKind { Neumann, Steklov };

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolveOptions {
    // Nonlinear descent: stop after stall_steps consecutive accepted steps
    // with relative quotient decrease below stall_tol, or when the
    // preconditioned gradient norm falls below grad_tol * (1 + quotient).
    double stall_tol = 1e-10;
    int stall_steps = 5;
    long max_iterations = 100000;
    int restarts = 4;
    std::uint64_t seed = 20240901;
    double grad_tol = 1e-9;
    // After the stall rule fires, keep polishing (monotone steps only) until
    // the gradient is this flat, within a bounded extra-iteration budget.
    double polish_grad_tol = 1e-7;
    int polish_budget = 400;

    // Linear path.
    double linear_tol = 1e-12;
    int linear_max_iterations = 600;
    int subspace_dim = 8;
    // Gap threshold below which the first eigenspace is reported as degenerate.
    double degeneracy_gap = 1e-6;
};

struct EigenResult {
    double lambda = 0.0;
    DiscreteField minimizer;  // centered (q-center 0) and L^q(w)-normalized
    double sharp_constant = 0.0;  // lambda^(-1/p)
    double weak_residual = 0.0;
    long iterations = 0;
    double normalization = 0.0;  // achieved value of the L^q(w)-norm constraint
    std::optional<DiscreteField> degenerate_pair;
    std::vector<double> spectrum_head;   // first nontrivial eigenvalues (linear path)
    std::vector<double> quotient_trace;  // accepted quotient values (nonlinear path)
};

// Unique c with integral Phi_q(u - c) w = 0.
double q_center(const DiscreteField& u, const WeightedNormForm& w, double q);

// ||grad u||_p^p / ( inf_c ||u-c||_{L^q(w)} )^p. Throws std::invalid_argument
// if u is constant on the weight's support.
double quotient(const AssembledForms& forms, ProblemKind which, const DiscreteField& u,
                double p, double q);

// First nontrivial eigenpair at p=q=2. Neumann: deflated inverse subspace
// iteration on (K, M_w). Steklov: Schur complement onto the boundary
// (discrete Dirichlet-to-Neumann) plus a dense generalized solve.
EigenResult solve_linear(const AssembledForms& forms, ProblemKind which,
                         const SolveOptions& opts = {});

// General (p,q): preconditioned projected-gradient descent on the quotient
// with Armijo backtracking, q-center recentering and L^q(w) renormalization;
// runs from fixed deterministic seeds (plus the optional init) and keeps the
// best stationary value.
EigenResult minimize_quotient(const AssembledForms& forms, ProblemKind which, double p, double q,
                              const SolveOptions& opts = {},
                              const DiscreteField* init = nullptr);

// max over 32 fixed-seed test fields v of
// |<omega |grad u|^{p-2} grad u, grad v> - lambda ||u||^{p-q} <Phi_q(u), v>_w|
// normalized by the discrete W^{1,p} norm of v.
double weak_residual(const EigenResult& result, const AssembledForms& forms, double p, double q,
                     ProblemKind which);

}  // namespace stek
