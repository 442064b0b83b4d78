#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace stek {

// Gauss-Legendre nodes/weights on [-1,1], computed by Newton iteration on P_n.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const GaussRule& gauss_legendre(int npoints);

// Integrate f over [a,b] with an n-point Gauss rule.
double gauss_integrate(const std::function<double(double)>& f, double a, double b, int npoints = 16);

// Integrate f over [0,1] on panels graded geometrically toward r=1.
// Panels: [0,1/2], [1-2^-j, 1-2^-(j-1)] for j=2..depth, final [1-2^-depth, 1].
// Robust for integrands that are smooth but steep near the right endpoint
// (concentrating radial densities).
double graded_unit_integral(const std::function<double(double)>& f, int depth = 52, int npoints = 16);

// Node/weight table for the graded rule above, reusable when many integrands
// share the same radial nodes.
std::vector<std::pair<double, double>> graded_unit_nodes(int depth = 52, int npoints = 16);

// Adaptive Gauss-Kronrod 7/15 with interval bisection.
double adaptive_integral(const std::function<double(double)>& f, double a, double b,
                         double abs_tol = 1e-12, double rel_tol = 1e-12, int max_depth = 40);

// Trapezoid rule for 2*pi-periodic functions sampled at n uniform points
// (spectrally accurate for smooth periodic integrands).
double periodic_integral(const std::function<double(double)>& f, int n = 2048);

// Degree-4 exact quadrature on the reference triangle, barycentric form.
// weights sum to 1; multiply by the physical triangle area.
struct TriangleRule {
    static constexpr int npoints = 6;
    std::array<std::array<double, 3>, npoints> bary;
    std::array<double, npoints> weights;
};

const TriangleRule& triangle_rule_degree4();

}  // namespace stek
