#include "steklimit/mesh.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace stek {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kVertexBudget = 500000;
}  // namespace

double DiskMesh::signed_area(int tri) const {
    const auto& t = triangles[tri];
    Eigen::RowVector2d a = vertices.row(t[0]), b = vertices.row(t[1]), c = vertices.row(t[2]);
    return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
}

double DiskMesh::total_area() const {
    double s = 0.0;
    for (int t = 0; t < triangle_count(); ++t) s += signed_area(t);
    return s;
}

DiskMesh build_disk_mesh(double h, double boundary_layer_width) {
    if (!(h > 0.0 && h <= 0.2)) throw std::invalid_argument("build_disk_mesh: h outside (0, 0.2]");
    if (!(boundary_layer_width > 0.0 && boundary_layer_width <= h))
        throw std::invalid_argument("build_disk_mesh: layer width outside (0, h]");

    // Ring widths from the boundary inward: thinnest first, growing
    // geometrically until the interior target h is reached, then uniform.
    const double ratio = 1.8;
    std::vector<double> widths;
    double depth = 0.0;
    double w = boundary_layer_width;
    while (depth + w < 1.0 - 0.5 * h) {
        widths.push_back(w);
        depth += w;
        w = std::min(w * ratio, h);
        if (widths.size() > 100000) throw std::length_error("build_disk_mesh: grading too deep");
    }
    // Remaining interior [0, 1-depth]: uniform rings of size ~h.
    const double rem = 1.0 - depth;
    const int inner = std::max(1, static_cast<int>(std::ceil(rem / h)));
    std::vector<double> radii;
    radii.reserve(inner + widths.size());
    for (int i = 1; i <= inner; ++i) radii.push_back(rem * i / inner);
    double r = rem;
    for (auto it = widths.rbegin(); it != widths.rend(); ++it) {
        r += *it;
        radii.push_back(r);
    }
    radii.back() = 1.0;

    const int rings = static_cast<int>(radii.size());
    // Even sector count keeps rotation by pi an exact mesh symmetry.
    int sectors = std::max(12, static_cast<int>(std::lround(kTwoPi / h)));
    if (sectors % 2 != 0) ++sectors;
    const long long nv = 1LL + static_cast<long long>(rings) * sectors;
    if (nv > kVertexBudget)
        throw std::length_error("build_disk_mesh: infeasible grading, vertex budget exceeded");

    DiskMesh mesh;
    mesh.h = h;
    mesh.layer_min = 1.0 - radii[rings - 2];
    mesh.grading_ratio = ratio;
    mesh.ring_radii = radii;
    mesh.sectors = sectors;
    mesh.vertices.resize(nv, 2);
    mesh.vertices.row(0) << 0.0, 0.0;
    auto vid = [&](int ring, int j) { return 1 + ring * sectors + (j % sectors); };
    for (int i = 0; i < rings; ++i) {
        for (int j = 0; j < sectors; ++j) {
            double th = kTwoPi * j / sectors;
            mesh.vertices.row(vid(i, j)) << radii[i] * std::cos(th), radii[i] * std::sin(th);
        }
    }

    // Inner fan.
    for (int j = 0; j < sectors; ++j)
        mesh.triangles.push_back({0, vid(0, j), vid(0, j + 1)});
    // Ring quads split along the same rotational orientation, keeping the
    // C_sectors symmetry (degenerate cos/sin pairs stay degenerate discretely).
    for (int i = 0; i + 1 < rings; ++i) {
        for (int j = 0; j < sectors; ++j) {
            int a = vid(i, j), b = vid(i, j + 1), c = vid(i + 1, j), d = vid(i + 1, j + 1);
            mesh.triangles.push_back({a, c, d});
            mesh.triangles.push_back({a, d, b});
        }
    }

    mesh.boundary_vertices.resize(sectors);
    for (int j = 0; j < sectors; ++j) {
        mesh.boundary_vertices[j] = vid(rings - 1, j);
        mesh.boundary.push_back({vid(rings - 1, j), vid(rings - 1, j + 1), kTwoPi * j / sectors,
                                 kTwoPi * (j + 1) / sectors});
    }
    return mesh;
}

DiskMesh push_through(const DiskMesh& mesh, const TransferMap& map) {
    DiskMesh out = mesh;
    for (int i = 0; i < mesh.vertex_count(); ++i) {
        Vec2 y = map.forward(Vec2(mesh.vertices(i, 0), mesh.vertices(i, 1)));
        out.vertices.row(i) << y.x(), y.y();
    }
    out.mapped = true;
    return out;
}

void write_mesh(const DiskMesh& mesh, std::ostream& out) {
    out.precision(17);
    out << mesh.vertex_count() << " vertices " << mesh.triangle_count() << " triangles "
        << mesh.boundary_count() << " boundary-edges\n";
    for (int i = 0; i < mesh.vertex_count(); ++i)
        out << mesh.vertices(i, 0) << ' ' << mesh.vertices(i, 1) << '\n';
    for (const auto& t : mesh.triangles) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    for (const auto& e : mesh.boundary)
        out << e.v0 << ' ' << e.v1 << ' ' << e.theta0 << ' ' << e.theta1 << '\n';
}

void write_mesh_file(const DiskMesh& mesh, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open mesh file for writing: " + path);
    write_mesh(mesh, f);
}

DiskMesh read_mesh(std::istream& in) {
    DiskMesh mesh;
    int nv, nt, nb;
    std::string w1, w2, w3;
    in >> nv >> w1 >> nt >> w2 >> nb >> w3;
    if (!in || w1 != "vertices" || w2 != "triangles" || w3 != "boundary-edges")
        throw std::runtime_error("bad mesh header");
    mesh.vertices.resize(nv, 2);
    for (int i = 0; i < nv; ++i) in >> mesh.vertices(i, 0) >> mesh.vertices(i, 1);
    mesh.triangles.resize(nt);
    for (auto& t : mesh.triangles) in >> t[0] >> t[1] >> t[2];
    mesh.boundary.resize(nb);
    for (auto& e : mesh.boundary) in >> e.v0 >> e.v1 >> e.theta0 >> e.theta1;
    if (!in) throw std::runtime_error("truncated mesh file");
    mesh.boundary_vertices.reserve(nb);
    for (const auto& e : mesh.boundary) mesh.boundary_vertices.push_back(e.v0);
    mesh.sectors = nb;
    return mesh;
}

DiskMesh read_mesh_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open mesh file: " + path);
    return read_mesh(f);
}

DiscreteField::DiscreteField(std::shared_ptr<const DiskMesh> m, Eigen::VectorXd v)
    : mesh(std::move(m)), values(std::move(v)) {
    if (!mesh) throw std::invalid_argument("DiscreteField: null mesh");
    if (values.size() != mesh->vertex_count())
        throw std::invalid_argument("DiscreteField: coefficient count differs from vertex count");
}

double DiscreteField::eval(double x, double y) const {
    const DiskMesh& m = *mesh;
    if (m.mapped || m.ring_radii.empty())
        throw std::logic_error("DiscreteField::eval: structured lookup needs the built disk mesh");
    double r = std::hypot(x, y);
    if (r > 1.0 + 1e-12) throw std::domain_error("DiscreteField::eval: point outside the disk");
    r = std::min(r, 1.0);
    double theta = std::atan2(y, x);
    if (theta < 0) theta += kTwoPi;

    const auto& radii = m.ring_radii;
    const int sectors = m.sectors;
    int ring = static_cast<int>(std::lower_bound(radii.begin(), radii.end(), r) - radii.begin());
    double sector_pos = theta / kTwoPi * sectors;
    int j = static_cast<int>(sector_pos) % sectors;
    auto vid = [&](int ri, int jj) { return 1 + ri * sectors + ((jj % sectors + sectors) % sectors); };

    auto bary_eval = [&](int va, int vb, int vc) -> std::pair<bool, double> {
        Eigen::Vector2d A = m.vertices.row(va), B = m.vertices.row(vb), C = m.vertices.row(vc);
        double det = (B.x() - A.x()) * (C.y() - A.y()) - (B.y() - A.y()) * (C.x() - A.x());
        if (det == 0.0) return {false, 0.0};
        double l1 = ((x - A.x()) * (C.y() - A.y()) - (y - A.y()) * (C.x() - A.x())) / det;
        double l2 = ((B.x() - A.x()) * (y - A.y()) - (B.y() - A.y()) * (x - A.x())) / det;
        double l0 = 1.0 - l1 - l2;
        const double tol = -1e-10;
        if (l0 < tol || l1 < tol || l2 < tol) return {false, 0.0};
        return {true, l0 * values[va] + l1 * values[vb] + l2 * values[vc]};
    };

    if (ring == 0) {
        auto [ok, v] = bary_eval(0, vid(0, j), vid(0, j + 1));
        if (ok) return v;
        auto [ok2, v2] = bary_eval(0, vid(0, j - 1), vid(0, j));
        if (ok2) return v2;
    } else {
        int i = ring - 1;
        for (int dj : {0, -1, 1}) {
            int jj = j + dj;
            auto [ok, v] = bary_eval(vid(i, jj), vid(i + 1, jj), vid(i + 1, jj + 1));
            if (ok) return v;
            auto [ok2, v2] = bary_eval(vid(i, jj), vid(i + 1, jj + 1), vid(i, jj + 1));
            if (ok2) return v2;
        }
    }
    throw std::runtime_error("DiscreteField::eval: point location failed");
}

DiscreteField interpolate(const std::shared_ptr<const DiskMesh>& mesh,
                          const std::function<double(Vec2)>& f) {
    Eigen::VectorXd v(mesh->vertex_count());
    for (int i = 0; i < mesh->vertex_count(); ++i)
        v[i] = f(Vec2(mesh->vertices(i, 0), mesh->vertices(i, 1)));
    return DiscreteField(mesh, std::move(v));
}

}  // namespace stek
