#pragma once

#include <vector>

#include "steklimit/weights.hpp"

namespace stek {

// Graded 1D grid on [0,1]: r_i = 1 - (1 - i/N)^kappa, with kappa chosen so the
// last spacing is at most a/(2n). The same kappa must be reused when refining.
struct RadialGrid {
    std::vector<double> r;  // ascending, r.front()=0, r.back()=1
    double kappa = 1.0;

    int cells() const { return static_cast<int>(r.size()) - 1; }
    double h_min() const;
};

RadialGrid make_radial_grid(int cells, double a, int n);
RadialGrid make_radial_grid_kappa(int cells, double kappa);

// Semi-analytic oracle for radial concentrating weights with alpha == 1 and
// p = q = 2: the k-th angular mode (Fourier at n=2, spherical degree at n=3)
// reduces to a 1D generalized problem
//   minimize  int (f'^2 + kap f^2/r^2) r^{n-1} dr / int f^2 rho_a r^{n-1} dr
// over f(0)=0, with kap = k^2 (n=2) or l(l+1) (n=3).

struct ModeEigen {
    double value;         // Richardson-extrapolated over N and 2N
    double coarse, fine;  // raw grid values
    double refine_delta;  // |fine - coarse|, discretization-floor estimate
};

// First eigenvalue of the mode-k Neumann problem. Throws std::domain_error if
// alpha is nonconstant, k < 1, or the grid is too coarse for the layer.
ModeEigen mode_neumann(int n, int k, const ConcentratingWeight& w, int cells = 600);
double mode_neumann_on_grid(int n, int k, const ConcentratingWeight& w, const RadialGrid& grid);

// Mode-k Neumann eigenfunction on the grid (interior nodes 1..N), normalized
// by the weighted mass form, boundary value positive.
std::vector<double> mode_neumann_eigenfunction(int n, int k, const ConcentratingWeight& w,
                                               const RadialGrid& grid, double* lambda_out = nullptr);

struct SteklovMode {
    double exact;     // k (n=2) or l (n=3), realized by f(r)=r^k
    double discrete;  // 1D discretization for consistency checking
};
SteklovMode mode_steklov(int n, int k, int cells = 2000);

// Weighted H^1(r^{n-1} dr) distance between the normalized mode-k Neumann
// minimizer and the Steklov minimizer r^k (Neumann side normalized in
// L^2(rho_a r^{n-1} dr), Steklov side by its boundary value, signs aligned).
double mode_minimizer_distance(int n, int k, const ConcentratingWeight& w, int cells = 600);

// Shooting-method cross check: integrates the mode ODE from r~0 and finds the
// eigenvalue with f'(1) = 0 by bisection, bracketing around a hint.
double mode_neumann_shooting(int n, int k, const ConcentratingWeight& w, double lambda_hint,
                             int steps = 20000);

}  // namespace stek
