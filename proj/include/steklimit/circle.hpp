#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "steklimit/weights.hpp"

namespace stek {

// Real trigonometric polynomial g(theta) = c0 + sum_k (a_k cos k theta + b_k sin k theta),
// degree capped at 256. The coefficient representation is authoritative;
// samples are derived from it.
class CircleFunction {
public:
    static constexpr int kMaxDegree = 256;

    CircleFunction() = default;  // zero function
    static CircleFunction constant(double c);
    static CircleFunction harmonic(int k, double cos_amp, double sin_amp = 0.0);
    static CircleFunction random(int degree, std::uint64_t seed, double scale = 1.0);

    double operator()(double theta) const;
    int degree() const { return static_cast<int>(cos_.size()); }
    double c0() const { return c0_; }
    double cos_coeff(int k) const;
    double sin_coeff(int k) const;
    void set_coeff(int k, double cos_amp, double sin_amp);

    CircleFunction& operator*=(double t);
    CircleFunction operator*(double t) const;
    CircleFunction operator+(const CircleFunction& o) const;
    CircleFunction operator-(const CircleFunction& o) const;

    double l2_norm() const;  // Parseval: sqrt(2 pi c0^2 + pi sum (a_k^2 + b_k^2))
    // ||g||_{L^q(dB, alpha)} by periodic quadrature (alpha==nullptr means alpha=1).
    double lq_norm(double q, const BoundaryWeight* alpha = nullptr) const;
    std::vector<double> sample(int npoints) const;

private:
    double c0_ = 0.0;
    std::vector<double> cos_, sin_;
};

// Poisson semigroup at radius r: mode k is multiplied by r^|k|. Requires 0 <= r < 1.
CircleFunction poisson_extend(const CircleFunction& g, double r);

// Separable bulk field u(r,theta) = sum_j f_j(r) * (cos or sin)(k_j theta).
struct RadialFourierField {
    struct Mode {
        int k;        // angular wavenumber (0 allowed with cosine meaning the constant 1)
        bool is_sin;  // false: cos(k theta); true: sin(k theta)
        std::function<double(double)> radial;  // f(r) on [0,1]
    };
    std::vector<Mode> modes;

    double eval(double r, double theta) const;
    // Boundary values f_j(1); throws std::invalid_argument if a radial profile
    // is not continuous at r=1.
    CircleFunction trace() const;
};

// Angular-only extension of g: (r,theta) -> g(theta).
RadialFourierField radial_extend(const CircleFunction& g);
// Harmonic extension: f_k(r) = r^|k| g_k.
RadialFourierField poisson_field(const CircleFunction& g);

// Fractional Slobodeckij norm on the circle (chordal distance kernel):
// ( ||g||_q^q + double integral |g(x)-g(y)|^q / |x-y|^{1+s q} )^{1/q}.
// The diagonal singularity is handled by the substitution eta = xi + tau and a
// geometric tau-grid of 64 panels down to tau_min = 1e-6.
double slobodeckij_norm(const CircleFunction& g, double s, double q);
// Gagliardo seminorm part alone (q-th power).
double slobodeckij_seminorm_pow(const CircleFunction& g, double s, double q);

// || P[g] - R[g] ||_{L^q(B, mu_a)} via the exact polar factorization
// ( int_0^1 ||P_r g - g||_{L^q(dB,alpha)}^q rho_a(r) r^{n-1} dr )^{1/q}.  n=2.
double poisson_radial_gap(const CircleFunction& g, const ConcentratingWeight& w, double q);

// || u - R[Tu] ||_{L^q(B, mu_a)} for a separable bulk field.  n=2.
double radial_trace_gap(const RadialFourierField& u, const ConcentratingWeight& w, double q);

// L^q(B, mu_a) norm of a separable bulk field (used by moment checks).
double bulk_lq_norm(const RadialFourierField& u, const ConcentratingWeight& w, double q);
// Signed moments: int_B Phi_q(u) mu_a and int_B |u|^q mu_a.
double bulk_q_moment(const RadialFourierField& u, const ConcentratingWeight& w, double q);
double bulk_signed_moment(const RadialFourierField& u, const ConcentratingWeight& w, double q);

}  // namespace stek
