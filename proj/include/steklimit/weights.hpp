#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace stek {

// Bounded nonnegative boundary profile alpha on the unit circle (n=2) or a
// constant on the unit sphere (n=3). Representations: constant, truncated
// Fourier series (degree <= 64), piecewise-linear table of samples on
// [0,2*pi), or a programmatic closure (not expressible in config files).
class BoundaryWeight {
public:
    enum class Kind { Constant, Fourier, Table, Custom };

    static BoundaryWeight constant(double value, int dim = 2);
    // value(theta) = c0 + sum_k (cos_coeffs[k-1] cos k theta + sin_coeffs[k-1] sin k theta)
    static BoundaryWeight fourier(double c0, std::vector<double> cos_coeffs,
                                  std::vector<double> sin_coeffs);
    // Equispaced samples on [0,2*pi), linear interpolation in angle.
    static BoundaryWeight table(std::vector<double> samples);
    static BoundaryWeight custom(std::function<double(double)> eval, std::string label = "custom");

    // Parse a config string: "constant:V" | "fourier:c0,a1,b1[,a2,b2,...]" | "table:v0,v1,...".
    static BoundaryWeight parse(const std::string& spec, int dim = 2);

    double operator()(double theta) const;
    double total_mass() const;  // A_alpha = integral over the boundary sphere
    double sup() const;         // essential sup from the representation (sampled for custom)
    Kind kind() const { return kind_; }
    int dim() const { return dim_; }
    bool is_constant() const { return kind_ == Kind::Constant; }
    double constant_value() const;
    std::string describe() const;

private:
    BoundaryWeight() = default;
    void validate() const;

    Kind kind_ = Kind::Constant;
    int dim_ = 2;
    double c0_ = 1.0;
    std::vector<double> cos_coeffs_, sin_coeffs_;
    std::vector<double> samples_;
    std::function<double(double)> eval_;
    std::string label_;
};

// The concentrating family: radial density rho_a(r) = (n/a) r^(n/a - n) on the
// unit ball, paired with a boundary profile alpha; mu_a = alpha_tilde * rho_a.
struct ConcentratingWeight {
    BoundaryWeight alpha;
    double a = 1.0;  // concentration parameter in (0,1]
    int n = 2;

    ConcentratingWeight(BoundaryWeight alpha_, double a_, int n_);

    double rho(double r) const;
    // Exact antiderivative of rho_a(r) r^(n-1) over [0,1]; identically 1.
    double radial_mass() const;
    // Total mass of mu_a, which equals A_alpha for every a.
    double total_mass() const;
    // mu_a in polar form (n=2 evaluation by angle).
    double mu(double r, double theta) const;
};

struct LayerSup {
    double value;
    double argmax_r;
};

// sup over r in (0,1) of (1-r)^m rho_a(r), with its maximizer. For a<1 the
// maximizer is r_a = (n/a-n)/(n/a-n+m); for a=1 the density is constant n and
// the sup sits at r=0.
LayerSup layer_sup(const ConcentratingWeight& w, double m);

// Polar decay moment: integral over [0,1] of (1-r)^(s q) rho_a(r) r^(n-1) dr
//                   = (n/a) * B(s q + 1, n/a), evaluated through log-gamma.
double beta_moment(const ConcentratingWeight& w, double s, double q);

// Exponent bookkeeping for the (p,q) range 1<p<n, 1<q<p(n-1)/(n-p).
struct Exponents {
    double p;
    double q;
    int n;

    // Throws std::domain_error unless the bundle invariants hold.
    static Exponents checked(double p, double q, int n);
    // No range validation (used for sanity runs outside the admissible range).
    static Exponents unchecked(double p, double q, int n) { return Exponents{p, q, n}; }

    bool in_range() const;
    double p_star() const;  // n p / (n - p)
    double theta() const;   // (p* - q) / (p* - p)
    double delta() const;   // min{1 - 1/p, 1 - n/p + (n-1)/q}
};

// min{1 - 1/p, 1 - n/p + (n-1)/q}; throws std::domain_error out of range.
double delta_exponent(const Exponents& b);

// Default concentration grid a_j = start * ratio^j.
std::vector<double> concentration_grid(double start = 0.4, double ratio = 0.5, int count = 6);

}  // namespace stek
