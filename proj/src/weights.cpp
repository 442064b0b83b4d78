#include "steklimit/weights.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace stek {

namespace {

constexpr int kMaxFourierDegree = 64;

std::vector<double> parse_csv_doubles(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t pos = 0;
        double v = std::stod(item, &pos);
        if (pos != item.size()) throw std::invalid_argument("bad number in weight spec: " + item);
        out.push_back(v);
    }
    return out;
}

}  // namespace

BoundaryWeight BoundaryWeight::constant(double value, int dim) {
    BoundaryWeight w;
    w.kind_ = Kind::Constant;
    w.dim_ = dim;
    w.c0_ = value;
    w.validate();
    return w;
}

BoundaryWeight BoundaryWeight::fourier(double c0, std::vector<double> cos_coeffs,
                                       std::vector<double> sin_coeffs) {
    BoundaryWeight w;
    w.kind_ = Kind::Fourier;
    w.dim_ = 2;
    w.c0_ = c0;
    w.cos_coeffs_ = std::move(cos_coeffs);
    w.sin_coeffs_ = std::move(sin_coeffs);
    w.sin_coeffs_.resize(std::max(w.cos_coeffs_.size(), w.sin_coeffs_.size()), 0.0);
    w.cos_coeffs_.resize(w.sin_coeffs_.size(), 0.0);
    if (static_cast<int>(w.cos_coeffs_.size()) > kMaxFourierDegree)
        throw std::invalid_argument("boundary weight: Fourier degree exceeds 64");
    w.validate();
    return w;
}

BoundaryWeight BoundaryWeight::table(std::vector<double> samples) {
    if (samples.size() < 3) throw std::invalid_argument("boundary weight table needs >= 3 samples");
    BoundaryWeight w;
    w.kind_ = Kind::Table;
    w.dim_ = 2;
    w.samples_ = std::move(samples);
    w.validate();
    return w;
}

BoundaryWeight BoundaryWeight::custom(std::function<double(double)> eval, std::string label) {
    BoundaryWeight w;
    w.kind_ = Kind::Custom;
    w.dim_ = 2;
    w.eval_ = std::move(eval);
    w.label_ = std::move(label);
    w.validate();
    return w;
}

BoundaryWeight BoundaryWeight::parse(const std::string& spec, int dim) {
    auto colon = spec.find(':');
    std::string kind = spec.substr(0, colon);
    std::string payload = colon == std::string::npos ? std::string() : spec.substr(colon + 1);
    if (kind == "constant") {
        if (payload.empty()) return constant(1.0, dim);
        return constant(std::stod(payload), dim);
    }
    if (kind == "fourier") {
        auto vals = parse_csv_doubles(payload);
        if (vals.empty()) throw std::invalid_argument("fourier weight spec needs coefficients");
        double c0 = vals[0];
        std::vector<double> ck, sk;
        for (std::size_t i = 1; i < vals.size(); i += 2) {
            ck.push_back(vals[i]);
            sk.push_back(i + 1 < vals.size() ? vals[i + 1] : 0.0);
        }
        return fourier(c0, std::move(ck), std::move(sk));
    }
    if (kind == "table") return table(parse_csv_doubles(payload));
    throw std::invalid_argument("unknown boundary weight spec: " + spec);
}

double BoundaryWeight::operator()(double theta) const {
    switch (kind_) {
        case Kind::Constant:
            return c0_;
        case Kind::Fourier: {
            double v = c0_;
            for (std::size_t k = 0; k < cos_coeffs_.size(); ++k) {
                double kt = (k + 1) * theta;
                v += cos_coeffs_[k] * std::cos(kt) + sin_coeffs_[k] * std::sin(kt);
            }
            return v;
        }
        case Kind::Table: {
            const double two_pi = 2.0 * std::numbers::pi;
            double t = std::fmod(theta, two_pi);
            if (t < 0) t += two_pi;
            const std::size_t m = samples_.size();
            double pos = t / two_pi * m;
            std::size_t i = static_cast<std::size_t>(pos) % m;
            double frac = pos - std::floor(pos);
            return samples_[i] * (1.0 - frac) + samples_[(i + 1) % m] * frac;
        }
        case Kind::Custom:
            return eval_(theta);
    }
    return 0.0;
}

double BoundaryWeight::total_mass() const {
    const double two_pi = 2.0 * std::numbers::pi;
    if (dim_ == 3) return 4.0 * std::numbers::pi * c0_;
    switch (kind_) {
        case Kind::Constant:
            return two_pi * c0_;
        case Kind::Fourier:
            return two_pi * c0_;  // harmonics integrate to zero
        case Kind::Table: {
            double s = 0.0;
            for (double v : samples_) s += v;
            return s / samples_.size() * two_pi;  // exact for the periodic PL interpolant
        }
        case Kind::Custom: {
            // Smooth periodic profile: trapezoid converges spectrally.
            const int n = 8192;
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += eval_(i * two_pi / n);
            return s * two_pi / n;
        }
    }
    return 0.0;
}

double BoundaryWeight::sup() const {
    switch (kind_) {
        case Kind::Constant:
            return c0_;
        case Kind::Table:
            return *std::max_element(samples_.begin(), samples_.end());
        default: {
            double m = 0.0;
            const int n = 4096;
            for (int i = 0; i < n; ++i)
                m = std::max(m, (*this)(i * 2.0 * std::numbers::pi / n));
            return m;
        }
    }
}

double BoundaryWeight::constant_value() const {
    if (kind_ != Kind::Constant) throw std::logic_error("boundary weight is not constant");
    return c0_;
}

std::string BoundaryWeight::describe() const {
    switch (kind_) {
        case Kind::Constant:
            return "constant:" + std::to_string(c0_);
        case Kind::Fourier:
            return "fourier(degree " + std::to_string(cos_coeffs_.size()) + ")";
        case Kind::Table:
            return "table(" + std::to_string(samples_.size()) + " samples)";
        case Kind::Custom:
            return label_;
    }
    return "?";
}

void BoundaryWeight::validate() const {
    if (dim_ < 2 || dim_ > 3) throw std::invalid_argument("boundary weight: dimension must be 2 or 3");
    if (dim_ == 3 && kind_ != Kind::Constant)
        throw std::invalid_argument("boundary weight: only constant profiles at n=3");
    if (kind_ == Kind::Table) {
        for (double v : samples_)
            if (!(v >= 0.0)) throw std::invalid_argument("boundary weight: negative table sample");
    }
    // Nonnegativity and nontriviality on a fine grid.
    const int n = 4096;
    double mass = 0.0;
    for (int i = 0; i < n; ++i) {
        double v = (*this)(i * 2.0 * std::numbers::pi / n);
        if (!(v >= -1e-12)) throw std::invalid_argument("boundary weight: negative value at angle");
        mass += v;
    }
    if (!(mass > 0.0)) throw std::invalid_argument("boundary weight: identically zero");
}

ConcentratingWeight::ConcentratingWeight(BoundaryWeight alpha_, double a_, int n_)
    : alpha(std::move(alpha_)), a(a_), n(n_) {
    if (!(a > 0.0) || a > 1.0)
        throw std::domain_error("concentrating weight: a must lie in (0,1]");
    if (n != alpha.dim())
        throw std::invalid_argument("concentrating weight: dimension mismatch with alpha");
}

double ConcentratingWeight::rho(double r) const {
    if (r < 0.0 || r > 1.0) throw std::domain_error("rho: r outside [0,1]");
    const double expo = static_cast<double>(n) / a - n;
    if (r == 0.0) return expo > 0.0 ? 0.0 : static_cast<double>(n);  // continuous limit
    return static_cast<double>(n) / a * std::pow(r, expo);
}

double ConcentratingWeight::radial_mass() const {
    // antiderivative of (n/a) r^(n/a-1) is r^(n/a)
    const double b = static_cast<double>(n) / a;
    return std::pow(1.0, b) - 0.0;
}

double ConcentratingWeight::total_mass() const { return alpha.total_mass(); }

double ConcentratingWeight::mu(double r, double theta) const {
    if (r == 0.0) return 0.0;  // alpha_tilde(0) = 0 by convention
    return alpha(theta) * rho(r);
}

LayerSup layer_sup(const ConcentratingWeight& w, double m) {
    if (!(m > 0.0)) throw std::invalid_argument("layer_sup: m must be positive");
    if (w.a == 1.0) return {static_cast<double>(w.n), 0.0};
    const double b = static_cast<double>(w.n) / w.a - w.n;  // exponent of the density
    const double r = b / (b + m);
    return {std::pow(1.0 - r, m) * w.rho(r), r};
}

double beta_moment(const ConcentratingWeight& w, double s, double q) {
    if (!(s > 0.0)) throw std::invalid_argument("beta_moment: s must be positive");
    if (!(q >= 1.0)) throw std::invalid_argument("beta_moment: q must be >= 1");
    const double b = static_cast<double>(w.n) / w.a;
    const double sq = s * q;
    // (n/a) B(sq+1, n/a) in log form; direct gamma overflows for small a.
    return std::exp(std::log(b) + std::lgamma(sq + 1.0) + std::lgamma(b) - std::lgamma(sq + 1.0 + b));
}

Exponents Exponents::checked(double p, double q, int n) {
    Exponents b{p, q, n};
    if (!b.in_range()) throw std::domain_error("exponents outside 1<p<n, 1<q<p(n-1)/(n-p)");
    return b;
}

bool Exponents::in_range() const {
    if (!(n >= 2)) return false;
    if (!(p > 1.0 && p < static_cast<double>(n))) return false;
    double q_max = p * (n - 1.0) / (n - p);
    return q > 1.0 && q < q_max;
}

double Exponents::p_star() const { return n * p / (n - p); }

double Exponents::theta() const { return (p_star() - q) / (p_star() - p); }

double Exponents::delta() const {
    return std::min(1.0 - 1.0 / p, 1.0 - n / p + (n - 1.0) / q);
}

double delta_exponent(const Exponents& b) {
    if (!b.in_range()) throw std::domain_error("delta_exponent: exponent-range violation");
    return b.delta();
}

std::vector<double> concentration_grid(double start, double ratio, int count) {
    if (!(start > 0.0 && start <= 1.0)) throw std::invalid_argument("a-grid start outside (0,1]");
    if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("a-grid ratio outside (0,1)");
    if (count < 1) throw std::invalid_argument("a-grid needs at least one point");
    std::vector<double> grid(count);
    double a = start;
    for (int i = 0; i < count; ++i, a *= ratio) grid[i] = a;
    return grid;
}

}  // namespace stek
