#include "steklimit/forms.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "steklimit/quadrature.hpp"

namespace stek {

namespace {

double phi_q(double t, double q) {
    if (t == 0.0) return 0.0;
    return std::pow(std::abs(t), q - 1.0) * (t > 0 ? 1.0 : -1.0);
}

}  // namespace

double WeightedNormForm::qcenter(const Eigen::VectorXd& u, double q) const {
    if (!(q > 1.0)) throw std::domain_error("qcenter: q must exceed 1");
    if (!(mass_ > 0.0)) throw std::domain_error("qcenter: weight mass must be positive");
    if (q == 2.0) {  // weighted mean, the linear special case
        double num = 0.0;
        for (const auto& e : entries_) {
            double uval = e.phi[0] * u[e.v[0]] + e.phi[1] * u[e.v[1]] + e.phi[2] * u[e.v[2]];
            num += e.w * uval;
        }
        return num / mass_;
    }
    double lo = u.minCoeff(), hi = u.maxCoeff();
    if (hi - lo < 1e-300) return lo;
    // signed_moment is strictly decreasing in c: positive at lo, negative at hi.
    double c = 0.5 * (lo + hi);
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
        double m = signed_moment(u, c, q);
        if (m > 0.0)
            lo = c;
        else
            hi = c;
        // Newton acceleration: d/dc signed_moment = -(q-1) integral |u-c|^{q-2} w
        double deriv = 0.0;
        for (const auto& e : entries_) {
            double uval = e.phi[0] * u[e.v[0]] + e.phi[1] * u[e.v[1]] + e.phi[2] * u[e.v[2]];
            double d = std::abs(uval - c);
            if (d > 0.0) deriv += e.w * std::pow(d, q - 2.0);
        }
        deriv *= -(q - 1.0);
        double cn = deriv < 0.0 ? c - m / deriv : 0.5 * (lo + hi);
        if (!(cn > lo && cn < hi)) cn = 0.5 * (lo + hi);
        if (std::abs(cn - c) < 1e-13 && hi - lo < 1e-9) return cn;
        c = cn;
    }
    return c;
}

double WeightedNormForm::signed_moment(const Eigen::VectorXd& u, double c, double q) const {
    double s = 0.0;
    for (const auto& e : entries_) {
        double uval = e.phi[0] * u[e.v[0]] + e.phi[1] * u[e.v[1]] + e.phi[2] * u[e.v[2]];
        s += e.w * phi_q(uval - c, q);
    }
    return s;
}

double WeightedNormForm::norm_q_pow(const Eigen::VectorXd& u, double c, double q) const {
    long double s = 0.0;
    for (const auto& e : entries_) {
        double uval = e.phi[0] * u[e.v[0]] + e.phi[1] * u[e.v[1]] + e.phi[2] * u[e.v[2]];
        s += static_cast<long double>(e.w) * std::pow(std::abs(uval - c), q);
    }
    return static_cast<double>(s);
}

void WeightedNormForm::add_norm_q_gradient(const Eigen::VectorXd& u, double c, double q,
                                           double scale, Eigen::VectorXd& out) const {
    for (const auto& e : entries_) {
        double uval = e.phi[0] * u[e.v[0]] + e.phi[1] * u[e.v[1]] + e.phi[2] * u[e.v[2]];
        double f = scale * q * e.w * phi_q(uval - c, q);
        out[e.v[0]] += f * e.phi[0];
        out[e.v[1]] += f * e.phi[1];
        out[e.v[2]] += f * e.phi[2];
    }
}

double WeightedNormForm::pairing(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
    double s = 0.0;
    for (const auto& e : entries_) {
        double uval = e.phi[0] * u[e.v[0]] + e.phi[1] * u[e.v[1]] + e.phi[2] * u[e.v[2]];
        double vval = e.phi[0] * v[e.v[0]] + e.phi[1] * v[e.v[1]] + e.phi[2] * v[e.v[2]];
        s += e.w * uval * vval;
    }
    return s;
}

double WeightedNormForm::phi_pairing(const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                                     double q) const {
    double s = 0.0;
    for (const auto& e : entries_) {
        double uval = e.phi[0] * u[e.v[0]] + e.phi[1] * u[e.v[1]] + e.phi[2] * u[e.v[2]];
        double vval = e.phi[0] * v[e.v[0]] + e.phi[1] * v[e.v[1]] + e.phi[2] * v[e.v[2]];
        s += e.w * phi_q(uval, q) * vval;
    }
    return s;
}

SparseMat WeightedNormForm::mass_matrix(int nvertices) const {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(entries_.size() * 9);
    for (const auto& e : entries_) {
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double v = e.w * e.phi[i] * e.phi[j];
                if (v != 0.0) trips.emplace_back(e.v[i], e.v[j], v);
            }
    }
    SparseMat m(nvertices, nvertices);
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
}

double EnergyForm::value(const Eigen::VectorXd& u, double p) const {
    long double s = 0.0;
    for (const auto& t : tris_) {
        Eigen::Vector3d loc(u[t.v[0]], u[t.v[1]], u[t.v[2]]);
        double g2 = (t.grad * loc).squaredNorm();
        s += static_cast<long double>(t.warea) * std::pow(g2, 0.5 * p);
    }
    return static_cast<double>(s);
}

void EnergyForm::add_value_gradient(const Eigen::VectorXd& u, double p, double scale,
                                    Eigen::VectorXd& out) const {
    for (const auto& t : tris_) {
        Eigen::Vector3d loc(u[t.v[0]], u[t.v[1]], u[t.v[2]]);
        Eigen::Vector2d g = t.grad * loc;
        double gn = g.norm();
        if (gn == 0.0) continue;
        Eigen::Vector3d contrib =
            (scale * p * std::pow(gn, p - 2.0) * t.warea) * (t.grad.transpose() * g);
        out[t.v[0]] += contrib[0];
        out[t.v[1]] += contrib[1];
        out[t.v[2]] += contrib[2];
    }
}

double EnergyForm::flux_pairing(const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                                double p) const {
    long double s = 0.0;
    for (const auto& t : tris_) {
        Eigen::Vector3d lu(u[t.v[0]], u[t.v[1]], u[t.v[2]]);
        Eigen::Vector3d lv(v[t.v[0]], v[t.v[1]], v[t.v[2]]);
        Eigen::Vector2d gu = t.grad * lu, gv = t.grad * lv;
        double gn = gu.norm();
        if (gn == 0.0) continue;
        s += static_cast<long double>(t.warea) * std::pow(gn, p - 2.0) * gu.dot(gv);
    }
    return static_cast<double>(s);
}

SparseMat EnergyForm::stiffness(int nvertices) const {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(tris_.size() * 9);
    for (const auto& t : tris_) {
        Eigen::Matrix3d k = t.warea * t.grad.transpose() * t.grad;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) trips.emplace_back(t.v[i], t.v[j], k(i, j));
    }
    SparseMat K(nvertices, nvertices);
    K.setFromTriplets(trips.begin(), trips.end());
    return K;
}

namespace {

struct TriGeometry {
    Eigen::Matrix<double, 2, 3> grad;
    double area;
};

TriGeometry tri_geometry(const DiskMesh& mesh, const std::array<int, 3>& t) {
    Eigen::Vector2d A = mesh.vertices.row(t[0]), B = mesh.vertices.row(t[1]),
                    C = mesh.vertices.row(t[2]);
    double det = (B.x() - A.x()) * (C.y() - A.y()) - (B.y() - A.y()) * (C.x() - A.x());
    if (det <= 0.0) throw std::runtime_error("assemble: nonpositive triangle orientation");
    TriGeometry g;
    g.area = 0.5 * det;
    // gradients of the barycentric basis
    g.grad.col(0) << (B.y() - C.y()) / det, (C.x() - B.x()) / det;
    g.grad.col(1) << (C.y() - A.y()) / det, (A.x() - C.x()) / det;
    g.grad.col(2) << (A.y() - B.y()) / det, (B.x() - A.x()) / det;
    return g;
}

void check_weight(double w, const Vec2& at) {
    if (w < 0.0) {
        std::ostringstream os;
        os << "assemble: negative weight sample at (" << at.x() << ", " << at.y() << ")";
        throw std::invalid_argument(os.str());
    }
}

// Radial stretch for the outermost ring of a built disk mesh: maps the
// straight quad (inner chord to outer chord) onto the curved cell (inner
// chord to the unit-circle arc), so weighted bulk quadrature sees the mass in
// the boundary slivers that the polygon misses. Returns the stretched point
// and the area jacobian of the map.
struct BoundaryStretch {
    double r_inner = 1.0;  // radius of the second-outermost ring
    int sectors = 0;
    bool active = false;

    explicit BoundaryStretch(const DiskMesh& mesh) {
        if (mesh.mapped || mesh.ring_radii.size() < 2 || mesh.sectors < 3) return;
        r_inner = mesh.ring_radii[mesh.ring_radii.size() - 2];
        sectors = mesh.sectors;
        active = true;
    }

    bool touches_outer_ring(const DiskMesh& mesh, const std::array<int, 3>& t) const {
        if (!active) return false;
        const double cut = 0.5 * (1.0 + r_inner);
        for (int v : t)
            if (mesh.vertices.row(v).norm() > cut) return true;
        return false;
    }

    std::pair<Vec2, double> map(const Vec2& x) const {
        const double rho = x.norm();
        double theta = std::atan2(x.y(), x.x());
        if (theta < 0) theta += 2.0 * std::numbers::pi;
        const double width = 2.0 * std::numbers::pi / sectors;
        const double mid = (std::floor(theta / width) + 0.5) * width;
        const double chord = std::cos(0.5 * width) / std::cos(theta - mid);
        const double c_in = r_inner * chord;
        const double s = (1.0 - c_in) / (chord - c_in);
        const double rho_s = c_in + (rho - c_in) * s;
        return {Vec2(rho_s * std::cos(theta), rho_s * std::sin(theta)), s * rho_s / rho};
    }
};

AssembledForms assemble_impl(const std::shared_ptr<const DiskMesh>& geom_mesh,
                             const std::shared_ptr<const DiskMesh>& ref_mesh,
                             const std::function<double(Vec2)>& bulk_weight,
                             const std::function<double(double)>& boundary_weight_at_angle,
                             const std::function<double(double)>& boundary_speed,
                             const std::function<double(Vec2)>& omega_p, double p) {
    AssembledForms forms;
    forms.mesh = geom_mesh;
    forms.p = p;
    const DiskMesh& mesh = *geom_mesh;
    const TriangleRule& rule = triangle_rule_degree4();
    const BoundaryStretch stretch(mesh);

    forms.bulk_norm.reserve(mesh.triangles.size() * rule.npoints);
    forms.plain_bulk.reserve(mesh.triangles.size() * rule.npoints);
    for (const auto& t : mesh.triangles) {
        TriGeometry g = tri_geometry(mesh, t);
        forms.plain_energy.add({{t[0], t[1], t[2]}, g.grad, g.area});
        EnergyForm::Tri et{{t[0], t[1], t[2]}, g.grad, g.area};
        if (omega_p) {
            double wsum = 0.0;
            for (int k = 0; k < rule.npoints; ++k) {
                Vec2 x = rule.bary[k][0] * mesh.vertices.row(t[0]).transpose() +
                         rule.bary[k][1] * mesh.vertices.row(t[1]).transpose() +
                         rule.bary[k][2] * mesh.vertices.row(t[2]).transpose();
                wsum += rule.weights[k] * omega_p(x);
            }
            et.warea = g.area * wsum;
        }
        forms.energy.add(et);

        const bool curved = stretch.touches_outer_ring(mesh, t);
        for (int k = 0; k < rule.npoints; ++k) {
            Vec2 x = rule.bary[k][0] * mesh.vertices.row(t[0]).transpose() +
                     rule.bary[k][1] * mesh.vertices.row(t[1]).transpose() +
                     rule.bary[k][2] * mesh.vertices.row(t[2]).transpose();
            double jac = 1.0;
            if (curved) {
                auto [xs, j] = stretch.map(x);
                x = xs;
                jac = j;
            }
            double bw = bulk_weight(x);
            check_weight(bw, x);
            WeightedNormForm::Entry e;
            e.v[0] = t[0];
            e.v[1] = t[1];
            e.v[2] = t[2];
            e.phi[0] = rule.bary[k][0];
            e.phi[1] = rule.bary[k][1];
            e.phi[2] = rule.bary[k][2];
            e.w = rule.weights[k] * g.area * jac * bw;
            forms.bulk_norm.add(e);
            e.w = rule.weights[k] * g.area * jac;
            forms.plain_bulk.add(e);
        }
    }

    // Boundary edges parametrized by the disk angle; dS = speed(theta) d theta.
    const GaussRule& gl = gauss_legendre(4);
    const DiskMesh& ref = *ref_mesh;
    forms.boundary_norm.reserve(ref.boundary.size() * gl.nodes.size());
    for (const auto& edge : ref.boundary) {
        const double mid = 0.5 * (edge.theta0 + edge.theta1);
        const double half = 0.5 * (edge.theta1 - edge.theta0);
        for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
            double theta = mid + half * gl.nodes[k];
            double lam = (theta - edge.theta0) / (edge.theta1 - edge.theta0);
            double bw = boundary_weight_at_angle(theta);
            check_weight(bw, Vec2(std::cos(theta), std::sin(theta)));
            WeightedNormForm::Entry e;
            e.v[0] = edge.v0;
            e.v[1] = edge.v1;
            e.v[2] = edge.v0;  // unused third slot
            e.phi[0] = 1.0 - lam;
            e.phi[1] = lam;
            e.phi[2] = 0.0;
            e.w = gl.weights[k] * half * bw * boundary_speed(theta);
            forms.boundary_norm.add(e);
        }
    }

    const int nv = mesh.vertex_count();
    forms.stiffness = forms.plain_energy.stiffness(nv);
    forms.bulk_mass = forms.bulk_norm.mass_matrix(nv);
    forms.boundary_mass = forms.boundary_norm.mass_matrix(nv);
    forms.plain_mass = forms.plain_bulk.mass_matrix(nv);
    return forms;
}

}  // namespace

AssembledForms assemble(const std::shared_ptr<const DiskMesh>& mesh,
                        const std::function<double(Vec2)>& bulk_weight,
                        const std::function<double(double)>& boundary_weight,
                        const TransferMap& map, double p) {
    std::function<double(Vec2)> omega;
    if (map.kind() == TransferMap::Kind::ConformalQuadratic && p != 2.0)
        omega = pullback_energy_weight(map, p);
    else if (map.kind() == TransferMap::Kind::RadialPower && p != 2.0)
        throw std::invalid_argument("assemble: radial-power pullback supports p=2 only");
    return assemble_impl(mesh, mesh, bulk_weight, boundary_weight,
                         [](double) { return 1.0; }, omega, p);
}

AssembledForms assemble_on_image(const std::shared_ptr<const DiskMesh>& disk_mesh,
                                 const TransferMap& map,
                                 const std::function<double(Vec2)>& bulk_weight_on_image,
                                 const std::function<double(double)>& boundary_weight_at_angle,
                                 double p) {
    auto image = std::make_shared<DiskMesh>(push_through(*disk_mesh, map));
    return assemble_impl(image, disk_mesh, bulk_weight_on_image, boundary_weight_at_angle,
                         [&map](double theta) { return map.boundary_speed(theta); },
                         std::function<double(Vec2)>(), p);
}

PEnergy p_energy(const DiscreteField& u, double p, const TransferMap& map) {
    if (!(p > 1.0)) throw std::domain_error("p_energy: p must exceed 1");
    std::function<double(Vec2)> omega;
    if (map.kind() == TransferMap::Kind::ConformalQuadratic && p != 2.0)
        omega = pullback_energy_weight(map, p);
    else if (map.kind() == TransferMap::Kind::RadialPower && p != 2.0)
        throw std::invalid_argument("p_energy: radial-power pullback supports p=2 only");

    const DiskMesh& mesh = *u.mesh;
    const TriangleRule& rule = triangle_rule_degree4();
    EnergyForm form;
    for (const auto& t : mesh.triangles) {
        TriGeometry g = tri_geometry(mesh, t);
        double warea = g.area;
        if (omega) {
            double wsum = 0.0;
            for (int k = 0; k < rule.npoints; ++k) {
                Vec2 x = rule.bary[k][0] * mesh.vertices.row(t[0]).transpose() +
                         rule.bary[k][1] * mesh.vertices.row(t[1]).transpose() +
                         rule.bary[k][2] * mesh.vertices.row(t[2]).transpose();
                wsum += rule.weights[k] * omega(x);
            }
            warea = g.area * wsum;
        }
        form.add({{t[0], t[1], t[2]}, g.grad, warea});
    }
    PEnergy out;
    out.value = form.value(u.values, p);
    out.gradient = Eigen::VectorXd::Zero(u.values.size());
    form.add_value_gradient(u.values, p, 1.0, out.gradient);
    return out;
}

}  // namespace stek
