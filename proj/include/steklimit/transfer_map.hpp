#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>

#include "steklimit/weights.hpp"

namespace stek {

using Vec2 = Eigen::Vector2d;

// Catalog of transfer mappings phi from the closed unit disk onto a target
// domain: identity, radial power phi(x)=|x|^(sigma-1) x with sigma in (0,1],
// and the conformal quadratic phi(z)=z+c z^2 with |c|<1/2 (univalent).
// Point operations are 2D; the identity can be constructed at n=3 for the
// radial oracle pipelines (it is never evaluated pointwise there).
class TransferMap {
public:
    enum class Kind { Identity, RadialPower, ConformalQuadratic };

    static TransferMap identity(int n = 2);
    static TransferMap radial_power(double sigma, int n = 2);
    static TransferMap conformal_quadratic(double c);
    // "identity" | "radial-power:S" | "conformal:C"
    static TransferMap parse(const std::string& spec, int n = 2);

    Kind kind() const { return kind_; }
    int dim() const { return n_; }
    double parameter() const { return param_; }
    std::string describe() const;
    bool image_is_disk() const { return kind_ != Kind::ConformalQuadratic; }

    Vec2 forward(const Vec2& x) const;
    Vec2 inverse(const Vec2& y) const;  // safeguarded Newton for the conformal kind
    double jacobian_det(const Vec2& x) const;
    Eigen::Matrix2d jacobian_matrix(const Vec2& x) const;

    // Boundary parametrization by the disk angle theta.
    Vec2 boundary_point(double theta) const;          // phi(e^{i theta})
    double boundary_speed(double theta) const;        // |d/dtheta phi(e^{i theta})|
    double boundary_angle(double theta) const;        // polar angle of phi(e^{i theta})
    double boundary_angle_inverse(double big_theta) const;  // theta with boundary_angle==big_theta
    // Volume derivative of the inverse boundary map at phi(e^{i theta}).
    double boundary_volume_derivative(double theta) const;

    // Star-shaped radius of the image domain in direction big_theta.
    double image_radius(double big_theta) const;

private:
    TransferMap(Kind k, int n, double param) : kind_(k), n_(n), param_(param) {}

    Kind kind_;
    int n_;
    double param_ = 0.0;
};

// Weights induced on the image domain: gamma_a(y) and the boundary weight
// beta. For identity and radial-power maps the image is the disk itself.
struct InducedWeights {
    TransferMap map;
    ConcentratingWeight source;

    double gamma(const Vec2& y) const;
    // beta at the boundary point phi(e^{i theta}), indexed by the disk angle.
    double beta_at_angle(double theta) const;
    double total_mass() const { return source.total_mass(); }
};

InducedWeights induce_weights(const TransferMap& map, const ConcentratingWeight& w);

struct CovGaps {
    double bulk;
    double boundary;
};

// |int_Omega f gamma_a - int_B (f.phi) mu_a| and the boundary analogue, each
// side computed by an independent quadrature (image-side star-shaped polar
// rays with Newton inversion vs disk-side graded polar rule).
CovGaps change_of_variables_check(const TransferMap& map, const ConcentratingWeight& w,
                                  const std::function<double(Vec2)>& f);

// omega_p(x) = |phi'(x)|^(2-p) such that the p-Dirichlet energy on the image
// pulls back to the weighted energy on the disk. Identity or conformal only.
std::function<double(Vec2)> pullback_energy_weight(const TransferMap& map, double p);

}  // namespace stek
