#include "steklimit/transfer_map.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "steklimit/quadrature.hpp"

namespace stek {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::complex<double> to_c(const Vec2& v) { return {v.x(), v.y()}; }
Vec2 to_v(std::complex<double> z) { return {z.real(), z.imag()}; }

}  // namespace

TransferMap TransferMap::identity(int n) {
    if (n < 2 || n > 3) throw std::invalid_argument("transfer map: dimension must be 2 or 3");
    return TransferMap(Kind::Identity, n, 0.0);
}

TransferMap TransferMap::radial_power(double sigma, int n) {
    if (!(sigma > 0.0 && sigma <= 1.0))
        throw std::invalid_argument("radial-power map: sigma must lie in (0,1]");
    if (n < 2 || n > 3) throw std::invalid_argument("transfer map: dimension must be 2 or 3");
    return TransferMap(Kind::RadialPower, n, sigma);
}

TransferMap TransferMap::conformal_quadratic(double c) {
    if (!(std::abs(c) < 0.5))
        throw std::invalid_argument("conformal map: need |c| < 1/2 for univalence");
    return TransferMap(Kind::ConformalQuadratic, 2, c);
}

TransferMap TransferMap::parse(const std::string& spec, int n) {
    if (spec == "identity") return identity(n);
    auto colon = spec.find(':');
    std::string kind = spec.substr(0, colon);
    std::string payload = colon == std::string::npos ? std::string() : spec.substr(colon + 1);
    if (kind == "radial-power") {
        if (payload.empty()) throw std::invalid_argument("radial-power map needs a parameter");
        return radial_power(std::stod(payload), n);
    }
    if (kind == "conformal") {
        if (payload.empty()) throw std::invalid_argument("conformal map needs a parameter");
        if (n != 2) throw std::invalid_argument("conformal map is 2D only");
        return conformal_quadratic(std::stod(payload));
    }
    throw std::invalid_argument("unknown transfer map spec: " + spec);
}

std::string TransferMap::describe() const {
    switch (kind_) {
        case Kind::Identity:
            return "identity";
        case Kind::RadialPower:
            return "radial-power:" + std::to_string(param_);
        case Kind::ConformalQuadratic:
            return "conformal:" + std::to_string(param_);
    }
    return "?";
}

Vec2 TransferMap::forward(const Vec2& x) const {
    switch (kind_) {
        case Kind::Identity:
            return x;
        case Kind::RadialPower: {
            double r = x.norm();
            if (r == 0.0) return Vec2::Zero();
            return std::pow(r, param_ - 1.0) * x;
        }
        case Kind::ConformalQuadratic: {
            auto z = to_c(x);
            return to_v(z + param_ * z * z);
        }
    }
    return x;
}

Vec2 TransferMap::inverse(const Vec2& y) const {
    switch (kind_) {
        case Kind::Identity:
            return y;
        case Kind::RadialPower: {
            double r = y.norm();
            if (r == 0.0) return Vec2::Zero();
            return std::pow(r, 1.0 / param_ - 1.0) * y;
        }
        case Kind::ConformalQuadratic: {
            // Newton on z + c z^2 = w; well conditioned for |c| < 1/2 on the disk.
            const std::complex<double> w = to_c(y);
            std::complex<double> z = w;
            for (int it = 0; it < 60; ++it) {
                std::complex<double> f = z + param_ * z * z - w;
                std::complex<double> df = 1.0 + 2.0 * param_ * z;
                std::complex<double> step = f / df;
                z -= step;
                if (std::abs(step) < 1e-15) break;
            }
            if (std::abs(z + param_ * z * z - w) > 1e-13 * (1.0 + std::abs(w)))
                throw std::runtime_error("conformal inverse: Newton did not converge");
            return to_v(z);
        }
    }
    return y;
}

double TransferMap::jacobian_det(const Vec2& x) const {
    switch (kind_) {
        case Kind::Identity:
            return 1.0;
        case Kind::RadialPower: {
            double r = x.norm();
            if (r == 0.0) return param_ < 1.0 ? std::numeric_limits<double>::infinity() : param_;
            return param_ * std::pow(r, n_ * (param_ - 1.0));
        }
        case Kind::ConformalQuadratic: {
            auto z = to_c(x);
            return std::norm(1.0 + 2.0 * param_ * z);
        }
    }
    return 1.0;
}

Eigen::Matrix2d TransferMap::jacobian_matrix(const Vec2& x) const {
    switch (kind_) {
        case Kind::Identity:
            return Eigen::Matrix2d::Identity();
        case Kind::RadialPower: {
            double r = x.norm();
            if (r == 0.0) throw std::domain_error("radial-power map: Dphi undefined at the origin");
            Vec2 u = x / r;
            return std::pow(r, param_ - 1.0) *
                   (Eigen::Matrix2d::Identity() + (param_ - 1.0) * u * u.transpose());
        }
        case Kind::ConformalQuadratic: {
            auto d = 1.0 + 2.0 * param_ * to_c(x);
            Eigen::Matrix2d J;
            J << d.real(), -d.imag(), d.imag(), d.real();
            return J;
        }
    }
    return Eigen::Matrix2d::Identity();
}

Vec2 TransferMap::boundary_point(double theta) const {
    Vec2 s{std::cos(theta), std::sin(theta)};
    return forward(s);
}

double TransferMap::boundary_speed(double theta) const {
    if (kind_ != Kind::ConformalQuadratic) return 1.0;
    return std::abs(1.0 + 2.0 * param_ * std::exp(std::complex<double>(0.0, theta)));
}

double TransferMap::boundary_angle(double theta) const {
    if (kind_ != Kind::ConformalQuadratic) return theta;
    auto w = std::exp(std::complex<double>(0.0, theta));
    // theta + arg(1 + c e^{i theta}), continuous in theta
    return theta + std::arg(1.0 + param_ * w);
}

double TransferMap::boundary_angle_inverse(double big_theta) const {
    if (kind_ != Kind::ConformalQuadratic) return big_theta;
    // boundary_angle is strictly increasing for |c|<1/2; Newton with bisection guard.
    double lo = big_theta - std::numbers::pi / 2, hi = big_theta + std::numbers::pi / 2;
    auto g = [&](double t) { return boundary_angle(t) - big_theta; };
    while (g(lo) > 0) lo -= 0.5;
    while (g(hi) < 0) hi += 0.5;
    double t = big_theta;
    for (int it = 0; it < 100; ++it) {
        double val = g(t);
        if (val > 0)
            hi = t;
        else
            lo = t;
        auto w = std::exp(std::complex<double>(0.0, t));
        auto cw = param_ * w;
        double dval = 1.0 + (cw.real() + std::norm(cw)) / std::norm(1.0 + cw);
        double tn = t - val / dval;
        if (!(tn > lo && tn < hi)) tn = 0.5 * (lo + hi);
        if (std::abs(tn - t) < 1e-15) return tn;
        t = tn;
    }
    return t;
}

double TransferMap::boundary_volume_derivative(double theta) const {
    if (kind_ != Kind::ConformalQuadratic) return 1.0;
    return 1.0 / boundary_speed(theta);
}

double TransferMap::image_radius(double big_theta) const {
    if (kind_ != Kind::ConformalQuadratic) return 1.0;
    return boundary_point(boundary_angle_inverse(big_theta)).norm();
}

double InducedWeights::gamma(const Vec2& y) const {
    Vec2 x = map.inverse(y);
    double r = x.norm();
    if (r == 0.0) return 0.0;
    double theta = std::atan2(x.y(), x.x());
    return source.mu(std::min(r, 1.0), theta) / map.jacobian_det(x);
}

double InducedWeights::beta_at_angle(double theta) const {
    return source.alpha(theta) * map.boundary_volume_derivative(theta);
}

InducedWeights induce_weights(const TransferMap& map, const ConcentratingWeight& w) {
    if (map.dim() != w.n)
        throw std::invalid_argument("induce_weights: map and weight dimensions differ");
    return InducedWeights{map, w};
}

namespace {

// Disk-side polar integral of F(x) against mu_a: graded radial rule x
// periodic trapezoid in angle.
double disk_weighted_integral(const ConcentratingWeight& w,
                              const std::function<double(double, double)>& f_polar,
                              int ntheta = 512) {
    auto radial = graded_unit_nodes();
    double total = 0.0;
    for (int i = 0; i < ntheta; ++i) {
        double theta = i * kTwoPi / ntheta;
        double alpha_val = w.alpha(theta);
        double ray = 0.0;
        for (const auto& [r, wt] : radial) ray += wt * f_polar(r, theta) * w.rho(r) * std::pow(r, w.n - 1);
        total += alpha_val * ray;
    }
    return total * kTwoPi / ntheta;
}

}  // namespace

CovGaps change_of_variables_check(const TransferMap& map, const ConcentratingWeight& w,
                                  const std::function<double(Vec2)>& f) {
    if (w.n != 2) throw std::invalid_argument("change_of_variables_check: 2D only");
    InducedWeights iw = induce_weights(map, w);

    // Bulk, disk side: int_B (f.phi) mu_a dx.
    double bulk_disk = disk_weighted_integral(w, [&](double r, double theta) {
        Vec2 x{r * std::cos(theta), r * std::sin(theta)};
        return f(map.forward(x));
    });

    // Bulk, image side: star-shaped polar rays with graded nodes toward the
    // image boundary; gamma_a evaluated through the inverse map per point.
    const int ntheta = 512;
    auto radial = graded_unit_nodes();
    double bulk_image = 0.0;
    for (int i = 0; i < ntheta; ++i) {
        double big_theta = (i + 0.5) * kTwoPi / ntheta;
        double R = map.image_radius(big_theta);
        double ray = 0.0;
        for (const auto& [t, wt] : radial) {
            double rho = t * R;
            Vec2 y{rho * std::cos(big_theta), rho * std::sin(big_theta)};
            ray += wt * f(y) * iw.gamma(y) * rho;
        }
        bulk_image += ray * R;
    }
    bulk_image *= kTwoPi / ntheta;

    // Boundary, disk side: int_{dB} (f.phi_d) alpha dsigma on theta nodes.
    const int nb = 4096;
    double bdry_disk = 0.0;
    for (int i = 0; i < nb; ++i) {
        double theta = i * kTwoPi / nb;
        bdry_disk += f(map.boundary_point(theta)) * w.alpha(theta);
    }
    bdry_disk *= kTwoPi / nb;

    // Boundary, image side: arclength integral of f beta over the image
    // boundary, parametrized by uniform image angles (inverted per node).
    double bdry_image = 0.0;
    for (int i = 0; i < nb; ++i) {
        double big_theta = (i + 0.5) * kTwoPi / nb;
        double theta = map.boundary_angle_inverse(big_theta);
        // dS = |dphi/dtheta| (dtheta/dTheta) dTheta
        double dtheta_dTheta;
        {
            double h = 1e-6;
            dtheta_dTheta = (map.boundary_angle_inverse(big_theta + h) -
                             map.boundary_angle_inverse(big_theta - h)) /
                            (2 * h);
        }
        bdry_image += f(map.boundary_point(theta)) * iw.beta_at_angle(theta) *
                      map.boundary_speed(theta) * dtheta_dTheta;
    }
    bdry_image *= kTwoPi / nb;

    return {std::abs(bulk_image - bulk_disk), std::abs(bdry_image - bdry_disk)};
}

std::function<double(Vec2)> pullback_energy_weight(const TransferMap& map, double p) {
    switch (map.kind()) {
        case TransferMap::Kind::Identity:
            return [](Vec2) { return 1.0; };
        case TransferMap::Kind::ConformalQuadratic: {
            double c = map.parameter();
            double e = 2.0 - p;
            return [c, e](Vec2 x) {
                double mod = std::abs(1.0 + 2.0 * c * std::complex<double>(x.x(), x.y()));
                return std::pow(mod, e);
            };
        }
        case TransferMap::Kind::RadialPower:
            throw std::invalid_argument("pullback_energy_weight: unsupported map kind for energy pullback");
    }
    throw std::invalid_argument("pullback_energy_weight: unsupported map kind for energy pullback");
}

}  // namespace stek
