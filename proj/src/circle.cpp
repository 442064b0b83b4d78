#include "steklimit/circle.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "steklimit/quadrature.hpp"

namespace stek {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

CircleFunction CircleFunction::constant(double c) {
    CircleFunction g;
    g.c0_ = c;
    return g;
}

CircleFunction CircleFunction::harmonic(int k, double cos_amp, double sin_amp) {
    CircleFunction g;
    if (k == 0) {
        g.c0_ = cos_amp;
        return g;
    }
    g.set_coeff(k, cos_amp, sin_amp);
    return g;
}

CircleFunction CircleFunction::random(int degree, std::uint64_t seed, double scale) {
    if (degree < 1 || degree > kMaxDegree)
        throw std::invalid_argument("CircleFunction::random: degree out of range");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    CircleFunction g;
    g.c0_ = scale * dist(rng);
    g.cos_.resize(degree);
    g.sin_.resize(degree);
    for (int k = 0; k < degree; ++k) {
        g.cos_[k] = scale * dist(rng);
        g.sin_[k] = scale * dist(rng);
    }
    return g;
}

double CircleFunction::operator()(double theta) const {
    double v = c0_;
    for (std::size_t k = 0; k < cos_.size(); ++k) {
        double kt = (k + 1) * theta;
        v += cos_[k] * std::cos(kt) + sin_[k] * std::sin(kt);
    }
    return v;
}

double CircleFunction::cos_coeff(int k) const {
    if (k == 0) return c0_;
    return k <= degree() ? cos_[k - 1] : 0.0;
}

double CircleFunction::sin_coeff(int k) const {
    if (k == 0) return 0.0;
    return k <= degree() ? sin_[k - 1] : 0.0;
}

void CircleFunction::set_coeff(int k, double cos_amp, double sin_amp) {
    if (k < 0 || k > kMaxDegree) throw std::invalid_argument("CircleFunction: degree out of range");
    if (k == 0) {
        c0_ = cos_amp;
        return;
    }
    if (k > degree()) {
        cos_.resize(k, 0.0);
        sin_.resize(k, 0.0);
    }
    cos_[k - 1] = cos_amp;
    sin_[k - 1] = sin_amp;
}

CircleFunction& CircleFunction::operator*=(double t) {
    c0_ *= t;
    for (auto& v : cos_) v *= t;
    for (auto& v : sin_) v *= t;
    return *this;
}

CircleFunction CircleFunction::operator*(double t) const {
    CircleFunction g = *this;
    g *= t;
    return g;
}

CircleFunction CircleFunction::operator+(const CircleFunction& o) const {
    CircleFunction g = *this;
    g.c0_ += o.c0_;
    if (o.degree() > g.degree()) {
        g.cos_.resize(o.degree(), 0.0);
        g.sin_.resize(o.degree(), 0.0);
    }
    for (int k = 0; k < o.degree(); ++k) {
        g.cos_[k] += o.cos_[k];
        g.sin_[k] += o.sin_[k];
    }
    return g;
}

CircleFunction CircleFunction::operator-(const CircleFunction& o) const { return *this + o * -1.0; }

double CircleFunction::l2_norm() const {
    double s = 2.0 * c0_ * c0_;
    for (std::size_t k = 0; k < cos_.size(); ++k) s += cos_[k] * cos_[k] + sin_[k] * sin_[k];
    return std::sqrt(std::numbers::pi * s);
}

double CircleFunction::lq_norm(double q, const BoundaryWeight* alpha) const {
    const int n = std::max(2048, 8 * (degree() + 1));
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        double theta = i * kTwoPi / n;
        double w = alpha ? (*alpha)(theta) : 1.0;
        s += std::pow(std::abs((*this)(theta)), q) * w;
    }
    return std::pow(s * kTwoPi / n, 1.0 / q);
}

std::vector<double> CircleFunction::sample(int npoints) const {
    std::vector<double> out(npoints);
    for (int i = 0; i < npoints; ++i) out[i] = (*this)(i * kTwoPi / npoints);
    return out;
}

CircleFunction poisson_extend(const CircleFunction& g, double r) {
    if (!(r >= 0.0 && r < 1.0)) throw std::domain_error("poisson_extend: radius must lie in [0,1)");
    CircleFunction out = CircleFunction::constant(g.c0());
    double rk = 1.0;
    for (int k = 1; k <= g.degree(); ++k) {
        rk *= r;
        out.set_coeff(k, rk * g.cos_coeff(k), rk * g.sin_coeff(k));
    }
    return out;
}

double RadialFourierField::eval(double r, double theta) const {
    double v = 0.0;
    for (const auto& m : modes) {
        double ang = m.is_sin ? std::sin(m.k * theta) : std::cos(m.k * theta);
        v += m.radial(r) * ang;
    }
    return v;
}

CircleFunction RadialFourierField::trace() const {
    CircleFunction g;
    for (const auto& m : modes) {
        double f1 = m.radial(1.0);
        double fnear = m.radial(1.0 - 1e-7);
        if (std::abs(f1 - fnear) > 1e-3 * (1.0 + std::abs(f1)))
            throw std::invalid_argument("trace undefined: radial profile not continuous at r=1");
        double c = g.cos_coeff(m.k), s = g.sin_coeff(m.k);
        if (m.is_sin)
            s += f1;
        else
            c += f1;
        g.set_coeff(m.k, c, s);
    }
    return g;
}

RadialFourierField radial_extend(const CircleFunction& g) {
    RadialFourierField u;
    u.modes.push_back({0, false, [c = g.c0()](double) { return c; }});
    for (int k = 1; k <= g.degree(); ++k) {
        if (g.cos_coeff(k) != 0.0)
            u.modes.push_back({k, false, [c = g.cos_coeff(k)](double) { return c; }});
        if (g.sin_coeff(k) != 0.0)
            u.modes.push_back({k, true, [c = g.sin_coeff(k)](double) { return c; }});
    }
    return u;
}

RadialFourierField poisson_field(const CircleFunction& g) {
    RadialFourierField u;
    u.modes.push_back({0, false, [c = g.c0()](double) { return c; }});
    for (int k = 1; k <= g.degree(); ++k) {
        if (g.cos_coeff(k) != 0.0)
            u.modes.push_back({k, false, [c = g.cos_coeff(k), k](double r) { return c * std::pow(r, k); }});
        if (g.sin_coeff(k) != 0.0)
            u.modes.push_back({k, true, [c = g.sin_coeff(k), k](double r) { return c * std::pow(r, k); }});
    }
    return u;
}

double slobodeckij_seminorm_pow(const CircleFunction& g, double s, double q) {
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("slobodeckij: s must lie in (0,1)");
    if (!(q >= 1.0)) throw std::invalid_argument("slobodeckij: q must be >= 1");
    const int ntheta = std::max(1024, 8 * (g.degree() + 1));
    const int panels = 64, glpts = 8;
    const double tau_min = 1e-6, tau_max = std::numbers::pi;
    const double ratio = std::pow(tau_max / tau_min, 1.0 / panels);

    std::vector<double> gs(ntheta);
    for (int i = 0; i < ntheta; ++i) gs[i] = g(i * kTwoPi / ntheta);

    double total = 0.0;
    double lo = tau_min;
    for (int p = 0; p < panels; ++p) {
        double hi = (p + 1 == panels) ? tau_max : lo * ratio;
        total += gauss_integrate(
            [&](double tau) {
                double kernel = std::pow(2.0 * std::sin(0.5 * tau), -1.0 - s * q);
                // inner theta integral of |g(theta+tau)-g(theta)|^q + |g(theta-tau)-g(theta)|^q
                double inner = 0.0;
                for (int i = 0; i < ntheta; ++i) {
                    double theta = i * kTwoPi / ntheta;
                    double gv = gs[i];
                    inner += std::pow(std::abs(g(theta + tau) - gv), q) +
                             std::pow(std::abs(g(theta - tau) - gv), q);
                }
                return kernel * inner * kTwoPi / ntheta;
            },
            lo, hi, glpts);
        lo = hi;
    }
    return total;
}

double slobodeckij_norm(const CircleFunction& g, double s, double q) {
    double lq = std::pow(g.lq_norm(q), q);
    return std::pow(lq + slobodeckij_seminorm_pow(g, s, q), 1.0 / q);
}

namespace {

// int_0^1 F(r) rho_a(r) r^{n-1} dr with the graded radial rule.
double radial_average(const ConcentratingWeight& w, const std::function<double(double)>& F) {
    auto nodes = graded_unit_nodes();
    double total = 0.0;
    for (const auto& [r, wt] : nodes) total += wt * F(r) * w.rho(r) * std::pow(r, w.n - 1);
    return total;
}

double angular_weighted_pow(const CircleFunction& g, const BoundaryWeight& alpha, double q,
                            int ntheta) {
    double s = 0.0;
    for (int i = 0; i < ntheta; ++i) {
        double theta = i * kTwoPi / ntheta;
        s += std::pow(std::abs(g(theta)), q) * alpha(theta);
    }
    return s * kTwoPi / ntheta;
}

}  // namespace

double poisson_radial_gap(const CircleFunction& g, const ConcentratingWeight& w, double q) {
    if (w.n != 2) throw std::invalid_argument("poisson_radial_gap: n=2 only");
    const int ntheta = std::max(1024, 8 * (g.degree() + 1));
    double pow_q = radial_average(w, [&](double r) {
        CircleFunction diff = poisson_extend(g, std::min(r, 1.0 - 1e-15)) - g;
        return angular_weighted_pow(diff, w.alpha, q, ntheta);
    });
    return std::pow(std::max(pow_q, 0.0), 1.0 / q);
}

namespace {

double bulk_integral(const RadialFourierField& u, const ConcentratingWeight& w,
                     const std::function<double(double)>& transform) {
    const int ntheta = 1024;
    return radial_average(w, [&](double r) {
        double s = 0.0;
        for (int i = 0; i < ntheta; ++i) {
            double theta = i * kTwoPi / ntheta;
            s += transform(u.eval(r, theta)) * w.alpha(theta);
        }
        return s * kTwoPi / ntheta;
    });
}

}  // namespace

double radial_trace_gap(const RadialFourierField& u, const ConcentratingWeight& w, double q) {
    if (w.n != 2) throw std::invalid_argument("radial_trace_gap: n=2 only");
    CircleFunction tr = u.trace();
    const int ntheta = 1024;
    double pow_q = radial_average(w, [&](double r) {
        double s = 0.0;
        for (int i = 0; i < ntheta; ++i) {
            double theta = i * kTwoPi / ntheta;
            s += std::pow(std::abs(u.eval(r, theta) - tr(theta)), q) * w.alpha(theta);
        }
        return s * kTwoPi / ntheta;
    });
    return std::pow(std::max(pow_q, 0.0), 1.0 / q);
}

double bulk_lq_norm(const RadialFourierField& u, const ConcentratingWeight& w, double q) {
    return std::pow(bulk_q_moment(u, w, q), 1.0 / q);
}

double bulk_q_moment(const RadialFourierField& u, const ConcentratingWeight& w, double q) {
    return bulk_integral(u, w, [q](double v) { return std::pow(std::abs(v), q); });
}

double bulk_signed_moment(const RadialFourierField& u, const ConcentratingWeight& w, double q) {
    return bulk_integral(u, w, [q](double v) {
        return v == 0.0 ? 0.0 : std::pow(std::abs(v), q - 1.0) * (v > 0 ? 1.0 : -1.0);
    });
}

}  // namespace stek
