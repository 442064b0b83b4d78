#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "steklimit/forms.hpp"
#include "steklimit/mesh.hpp"

using namespace stek;

namespace {
constexpr double kPi = std::numbers::pi;

std::shared_ptr<const DiskMesh> make_mesh(double h, double layer) {
    return std::make_shared<DiskMesh>(build_disk_mesh(h, layer));
}

AssembledForms unit_forms(const std::shared_ptr<const DiskMesh>& mesh, double p = 2.0) {
    return assemble(
        mesh, [](Vec2) { return 1.0; }, [](double) { return 1.0; }, TransferMap::identity(2), p);
}

double matrix_total(const SparseMat& m) {
    double s = 0.0;
    for (int c = 0; c < m.outerSize(); ++c)
        for (SparseMat::InnerIterator it(m, c); it; ++it) s += it.value();
    return s;
}
}  // namespace

TEST_CASE("mesh construction: areas, orientation, boundary cycle") {
    auto mesh = make_mesh(0.1, 0.1);
    double deficit = kPi - mesh->total_area();
    CHECK(deficit > 0.0);
    CHECK(deficit < 0.05);
    for (int t = 0; t < mesh->triangle_count(); ++t) CHECK(mesh->signed_area(t) > 0.0);
    // boundary edges form a single closed CCW cycle
    for (int j = 0; j < mesh->boundary_count(); ++j) {
        const auto& e = mesh->boundary[j];
        const auto& next = mesh->boundary[(j + 1) % mesh->boundary_count()];
        CHECK(e.v1 == next.v0);
        CHECK(mesh->vertices.row(e.v0).norm() == doctest::Approx(1.0).epsilon(1e-14));
    }

    // grading: h=0.05 with layer 0.005 puts at least 3 rings thinner than 0.02
    auto graded = make_mesh(0.05, 0.005);
    int thin = 0;
    for (std::size_t i = 1; i < graded->ring_radii.size(); ++i)
        if (graded->ring_radii[i] - graded->ring_radii[i - 1] < 0.02) ++thin;
    CHECK(thin >= 3);
    CHECK(graded->layer_min <= 0.005 + 1e-15);

    // refinement: halving h reduces the area deficit by roughly 4x
    double d1 = kPi - make_mesh(0.1, 0.1)->total_area();
    double d2 = kPi - make_mesh(0.05, 0.05)->total_area();
    CHECK(d1 / d2 >= 3.0);
    CHECK(d1 / d2 <= 5.0);

    CHECK_THROWS_AS(build_disk_mesh(0.3, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(build_disk_mesh(0.1, 0.2), std::invalid_argument);
    CHECK_THROWS_AS(build_disk_mesh(0.002, 0.002), std::length_error);  // vertex budget
}

TEST_CASE("mesh text format round trip") {
    auto mesh = make_mesh(0.1, 0.05);
    std::stringstream ss;
    write_mesh(*mesh, ss);
    std::string header;
    std::getline(ss, header);
    CHECK(header.find("vertices") != std::string::npos);
    CHECK(header.find("triangles") != std::string::npos);
    CHECK(header.find("boundary-edges") != std::string::npos);
    ss.seekg(0);
    DiskMesh back = read_mesh(ss);
    CHECK(back.vertex_count() == mesh->vertex_count());
    CHECK(back.triangle_count() == mesh->triangle_count());
    CHECK(back.boundary_count() == mesh->boundary_count());
    CHECK(back.vertices(5, 0) == mesh->vertices(5, 0));
    CHECK(back.triangles[3] == mesh->triangles[3]);
}

TEST_CASE("assembled forms: kernel, totals, positivity") {
    auto mesh = make_mesh(0.05, 0.05);
    AssembledForms forms = unit_forms(mesh);

    // stiffness annihilates constants
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(mesh->vertex_count());
    CHECK((forms.stiffness * ones).lpNorm<Eigen::Infinity>() <= 1e-12);

    // bulk mass total: area of the disk (curved quadrature sees the slivers)
    CHECK(matrix_total(forms.bulk_mass) == doctest::Approx(kPi).epsilon(0.01));
    // boundary total: 2 pi by the exact arclength parametrization
    CHECK(matrix_total(forms.boundary_mass) == doctest::Approx(2.0 * kPi).epsilon(1e-10));

    // positivity of the weighted mass
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::VectorXd v(mesh->vertex_count());
    for (int i = 0; i < v.size(); ++i) v[i] = dist(rng);
    CHECK(v.dot(forms.bulk_mass * v) > 0.0);
    CHECK(ones.dot(forms.bulk_mass * ones) > 0.0);

    // negative weight sample rejected with the offending point named
    CHECK_THROWS_WITH_AS(
        assemble(
            mesh, [](Vec2 x) { return x.x(); }, [](double) { return 1.0; },
            TransferMap::identity(2), 2.0),
        doctest::Contains("negative weight sample at"), std::invalid_argument);
}

TEST_CASE("weighted mass against the analytic total") {
    // w = mu_a at a=0.2: total of M_w equals A_alpha well within 0.5%
    ConcentratingWeight w(BoundaryWeight::constant(1.0, 2), 0.2, 2);
    auto mesh = make_mesh(0.05, 0.01);
    AssembledForms forms = assemble(
        mesh,
        [&](Vec2 x) { return w.mu(std::min(x.norm(), 1.0), std::atan2(x.y(), x.x())); },
        [](double) { return 1.0; }, TransferMap::identity(2), 2.0);
    double total = matrix_total(forms.bulk_mass);
    CHECK(std::abs(total - w.total_mass()) / w.total_mass() <= 0.005);

    // error shrinks under refinement
    auto fine = make_mesh(0.025, 0.005);
    AssembledForms ff = assemble(
        fine, [&](Vec2 x) { return w.mu(std::min(x.norm(), 1.0), std::atan2(x.y(), x.x())); },
        [](double) { return 1.0; }, TransferMap::identity(2), 2.0);
    double e1 = std::abs(total - w.total_mass());
    double e2 = std::abs(matrix_total(ff.bulk_mass) - w.total_mass());
    CHECK(e2 <= e1);
}

TEST_CASE("p-energy values and analytic gradient") {
    auto mesh = make_mesh(0.05, 0.05);
    // affine coordinate field: |grad|^2 = 1, energy = mesh area
    DiscreteField x1 = interpolate(mesh, [](Vec2 x) { return x.x(); });
    PEnergy e = p_energy(x1, 2.0, TransferMap::identity(2));
    CHECK(e.value == doctest::Approx(kPi).epsilon(0.01));

    DiscreteField c = interpolate(mesh, [](Vec2) { return 3.0; });
    PEnergy ec = p_energy(c, 2.0, TransferMap::identity(2));
    CHECK(ec.value <= 1e-20);  // exact constants: gradient only up to roundoff
    CHECK(ec.gradient.lpNorm<Eigen::Infinity>() <= 1e-12);

    // Galerkin consistency at p=2
    AssembledForms forms = unit_forms(mesh);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::VectorXd v(mesh->vertex_count());
    for (int i = 0; i < v.size(); ++i) v[i] = dist(rng);
    DiscreteField u(mesh, v);
    PEnergy e2 = p_energy(u, 2.0, TransferMap::identity(2));
    CHECK(e2.value == doctest::Approx(v.dot(forms.stiffness * v)).epsilon(1e-10));

    // finite-difference check of the gradient at p = 1.5
    auto coarse = make_mesh(0.15, 0.15);
    Eigen::VectorXd vc(coarse->vertex_count());
    std::mt19937_64 rng2(23);
    for (int i = 0; i < vc.size(); ++i) vc[i] = dist(rng2);
    DiscreteField uc(coarse, vc);
    PEnergy base = p_energy(uc, 1.5, TransferMap::identity(2));
    const double step = 1e-6;
    for (int i = 0; i < std::min<int>(12, vc.size()); ++i) {
        Eigen::VectorXd vp = vc, vm = vc;
        vp[i] += step;
        vm[i] -= step;
        double fd = (p_energy(DiscreteField(coarse, vp), 1.5, TransferMap::identity(2)).value -
                     p_energy(DiscreteField(coarse, vm), 1.5, TransferMap::identity(2)).value) /
                    (2 * step);
        CHECK(base.gradient[i] == doctest::Approx(fd).epsilon(1e-5));
    }
}

TEST_CASE("mapped-mesh stiffness consistency for conformal maps") {
    TransferMap map = TransferMap::conformal_quadratic(0.25);
    auto disk = make_mesh(0.05, 0.05);
    // same coefficients viewed on the disk (pullback) and on the image mesh
    DiscreteField v(disk, Eigen::VectorXd(disk->vertex_count()));
    for (int i = 0; i < disk->vertex_count(); ++i) {
        Vec2 y = map.forward(Vec2(disk->vertices(i, 0), disk->vertices(i, 1)));
        v.values[i] = y.x() * y.x() - y.y();
    }
    AssembledForms pullback = unit_forms(disk);  // omega_2 == 1: plain disk stiffness
    AssembledForms direct = assemble_on_image(
        disk, map, [](Vec2) { return 1.0; }, [](double) { return 1.0; }, 2.0);
    double e_disk = v.values.dot(pullback.stiffness * v.values);
    double e_image = v.values.dot(direct.stiffness * v.values);
    CHECK(e_disk == doctest::Approx(e_image).epsilon(0.01));
}

TEST_CASE("discrete field evaluation") {
    auto mesh = make_mesh(0.1, 0.05);
    DiscreteField f = interpolate(mesh, [](Vec2 x) { return 2.0 * x.x() - 0.5 * x.y(); });
    // P1 reproduces affine functions inside every triangle
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        double r = std::sqrt(dist(rng)) * 0.999;
        double th = 2.0 * kPi * dist(rng);
        double x = r * std::cos(th), y = r * std::sin(th);
        CHECK(f.eval(x, y) == doctest::Approx(2.0 * x - 0.5 * y).epsilon(1e-10));
    }
    CHECK_THROWS_AS(f.eval(2.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(DiscreteField(mesh, Eigen::VectorXd::Zero(3)), std::invalid_argument);
}
