#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <memory>
#include <optional>

#include "steklimit/mesh.hpp"
#include "steklimit/transfer_map.hpp"

namespace stek {

using SparseMat = Eigen::SparseMatrix<double>;

// Quadrature table for a weighted L^q form, bulk (triangle points) or
// boundary (edge points). Each entry carries up to three vertex indices with
// P1 basis values and the combined factor weight * measure.
class WeightedNormForm {
public:
    struct Entry {
        int v[3];
        double phi[3];
        double w;
    };

    void add(const Entry& e) {
        entries_.push_back(e);
        mass_ += e.w;
    }
    void reserve(std::size_t n) { entries_.reserve(n); }

    double mass() const { return mass_; }
    std::size_t size() const { return entries_.size(); }

    // Unique root of c -> integral Phi_q(u-c) w, bracketed on [min u, max u],
    // found to 1e-12 by bisection with Newton acceleration inside the bracket.
    double qcenter(const Eigen::VectorXd& u, double q) const;
    // integral Phi_q(u-c) w  (Phi_q(t) = |t|^{q-2} t)
    double signed_moment(const Eigen::VectorXd& u, double c, double q) const;
    // integral |u-c|^q w
    double norm_q_pow(const Eigen::VectorXd& u, double c, double q) const;
    // grad_u of norm_q_pow: out += scale * q * Phi_q(u-c) phi_i w
    void add_norm_q_gradient(const Eigen::VectorXd& u, double c, double q, double scale,
                             Eigen::VectorXd& out) const;
    // integral u v w (the q=2 bilinear pairing)
    double pairing(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const;
    // integral Phi_q(u) v w
    double phi_pairing(const Eigen::VectorXd& u, const Eigen::VectorXd& v, double q) const;
    // Consistent mass matrix sum w phi phi^T.
    SparseMat mass_matrix(int nvertices) const;

private:
    std::vector<Entry> entries_;
    double mass_ = 0.0;
};

// Piecewise-constant-gradient p-Dirichlet energy with an optional pullback
// weight integrated per triangle.
class EnergyForm {
public:
    struct Tri {
        int v[3];
        Eigen::Matrix<double, 2, 3> grad;  // P1 basis gradients
        double warea;                      // integral of omega_p over the triangle
    };

    void add(const Tri& t) { tris_.push_back(t); }
    std::size_t size() const { return tris_.size(); }

    double value(const Eigen::VectorXd& u, double p) const;
    // out += scale * p |grad u|^{p-2} grad u . dgrad/du_i * warea
    void add_value_gradient(const Eigen::VectorXd& u, double p, double scale,
                            Eigen::VectorXd& out) const;
    // <|grad u|^{p-2} grad u, grad v> with the same per-triangle weights
    double flux_pairing(const Eigen::VectorXd& u, const Eigen::VectorXd& v, double p) const;
    SparseMat stiffness(int nvertices) const;  // p=2 bilinear form

private:
    std::vector<Tri> tris_;
};

// Everything a solver needs on one mesh: p=2 stiffness (with omega_2 == 1),
// weighted bulk and boundary mass matrices and quadrature tables, the
// p-energy form with its pullback weight, and unweighted companions used for
// preconditioning and discrete W^{1,p} norms.
struct AssembledForms {
    std::shared_ptr<const DiskMesh> mesh;
    double p = 2.0;

    SparseMat stiffness;
    SparseMat bulk_mass;        // M_w
    SparseMat boundary_mass;    // B_w
    SparseMat plain_mass;       // unweighted bulk mass (preconditioner, norms)

    WeightedNormForm bulk_norm;      // against the bulk weight
    WeightedNormForm boundary_norm;  // against the boundary weight
    WeightedNormForm plain_bulk;     // weight 1

    EnergyForm energy;        // includes omega_p when the map is conformal
    EnergyForm plain_energy;  // unweighted p-Dirichlet form (norms, diagnostics)
};

// Assemble on the disk mesh (pullback route). bulk_weight(x) is evaluated at
// interior quadrature points of the disk; boundary_weight(theta) on the unit
// circle with exact arclength d theta. The map contributes only the pullback
// energy weight omega_p (identity/conformal; radial-power demands p==2).
// Throws std::invalid_argument naming the point if a weight sample is negative.
AssembledForms assemble(const std::shared_ptr<const DiskMesh>& mesh,
                        const std::function<double(Vec2)>& bulk_weight,
                        const std::function<double(double)>& boundary_weight,
                        const TransferMap& map, double p);

// Assemble directly on the image mesh (vertices pushed through the map):
// plain P1 geometry on image triangles, bulk weight at image points, boundary
// weight at phi(e^{i theta}) with arclength |dphi/dtheta| d theta.
AssembledForms assemble_on_image(const std::shared_ptr<const DiskMesh>& disk_mesh,
                                 const TransferMap& map,
                                 const std::function<double(Vec2)>& bulk_weight_on_image,
                                 const std::function<double(double)>& boundary_weight_at_angle,
                                 double p);

// Elementwise p-energy of a field with its analytic gradient.
struct PEnergy {
    double value;
    Eigen::VectorXd gradient;
};
PEnergy p_energy(const DiscreteField& u, double p, const TransferMap& map);

}  // namespace stek
