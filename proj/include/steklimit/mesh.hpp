#pragma once

#include <Eigen/Dense>
#include <array>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "steklimit/transfer_map.hpp"

namespace stek {

// Structured polar triangulation of the unit disk: concentric rings times
// uniform angular sectors, each quad split into two triangles, an inner fan
// around the center vertex. Ring spacing is uniform (~h) in the interior and
// graded geometrically toward r=1 down to a thinnest layer.
struct DiskMesh {
    Eigen::Matrix<double, Eigen::Dynamic, 2> vertices;
    std::vector<std::array<int, 3>> triangles;  // positive orientation

    struct BoundaryEdge {
        int v0, v1;          // CCW along the boundary
        double theta0, theta1;  // disk angles of the endpoints (theta1 > theta0)
    };
    std::vector<BoundaryEdge> boundary;
    std::vector<int> boundary_vertices;  // ordered CCW, boundary_vertices[j] at angle 2 pi j / sectors

    std::vector<double> ring_radii;  // ascending, last entry 1
    int sectors = 0;
    double h = 0.0;            // target interior size
    double layer_min = 0.0;    // thinnest radial layer actually built
    double grading_ratio = 2.0;
    bool mapped = false;       // vertices pushed through a transfer map

    int vertex_count() const { return static_cast<int>(vertices.rows()); }
    int triangle_count() const { return static_cast<int>(triangles.size()); }
    int boundary_count() const { return static_cast<int>(boundary.size()); }
    double total_area() const;
    double signed_area(int tri) const;
};

// Builds the graded polar mesh. Throws std::invalid_argument for parameters
// out of range and std::length_error when grading would exceed the
// 5e5-vertex budget.
DiskMesh build_disk_mesh(double h, double boundary_layer_width);

// Vertices pushed through the map; connectivity and boundary angles kept.
DiskMesh push_through(const DiskMesh& mesh, const TransferMap& map);

// Plain-text mesh format:
//   <V> vertices <T> triangles <B> boundary-edges
//   x y                  (V lines)
//   i j k                (T lines)
//   v0 v1 theta0 theta1  (B lines)
void write_mesh(const DiskMesh& mesh, std::ostream& out);
void write_mesh_file(const DiskMesh& mesh, const std::string& path);
DiskMesh read_mesh(std::istream& in);
DiskMesh read_mesh_file(const std::string& path);

// Nodal coefficients over a mesh.
struct DiscreteField {
    std::shared_ptr<const DiskMesh> mesh;
    Eigen::VectorXd values;

    DiscreteField() = default;
    DiscreteField(std::shared_ptr<const DiskMesh> m, Eigen::VectorXd v);

    // P1 interpolation at a point of the (unmapped) disk mesh.
    double eval(double x, double y) const;
};

// Vertex interpolation of a smooth function.
DiscreteField interpolate(const std::shared_ptr<const DiskMesh>& mesh,
                          const std::function<double(Vec2)>& f);

}  // namespace stek
