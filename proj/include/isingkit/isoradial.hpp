#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "isingkit/dual_pair.hpp"
#include "isingkit/generators.hpp"
#include "isingkit/spinor.hpp"
#include "isingkit/weights.hpp"

namespace isingkit {

inline constexpr double kDefaultThetaMin = 0.05;

// Rhombus data of an isoradial pair: every quad (v•0, v°0, v•1, v°1) has four
// sides of length delta; theta[z] is its half-angle at the G• vertices.
struct IsoradialGeometry {
    double delta = 0;
    std::vector<double> theta;
};

// Throws DomainError when some quad is not a rhombus of the common side.
IsoradialGeometry isoradial_geometry(const DualPair& dp, double tol = 1e-9);
bool is_isoradial(const DualPair& dp, double tol = 1e-9);
// x_e = tan(theta_e / 2) from the rhombus angles; free edges keep x = 1.
IsingWeights critical_isoradial_weights(const DualPair& dp);

struct IsoradialMap {
    PlanarMap map;
    IsingWeights weights;
    std::vector<double> theta;  // per G-edge, NaN on free edges
    double delta = 0;
};

// Square grid of width x height vertices, rhombus side delta (spacing delta*sqrt2).
IsoradialMap square_lattice(double delta, int width, int height,
                            SideTypes sides = {ArcType::Wired, ArcType::Wired, ArcType::Wired, ArcType::Wired});

// Rhombic tiling with train-track directions: Λ-step m in the first family
// is delta*exp(i*row_angles[m mod]), step n in the second is
// delta*exp(i*col_angles[n mod]). G• is the (width x height) grid of even
// Λ-points. Every rhombus angle must lie in [2 theta_min, pi - 2 theta_min].
struct RhombicPattern {
    std::vector<double> row_angles{-M_PI / 4};
    std::vector<double> col_angles{M_PI / 4};
};
IsoradialMap rhombic_lattice(const RhombicPattern& pattern, int width, int height, double delta = 1.0,
                             SideTypes sides = {ArcType::Wired, ArcType::Wired, ArcType::Wired, ArcType::Wired},
                             double theta_min = kDefaultThetaMin);

// Triangular G• (60 degree rhombi, theta = pi/6) on a width x height
// parallelogram; G° is the honeycomb lattice.
IsoradialMap triangular_lattice(int width, int height, double delta = 1.0,
                                double theta_min = kDefaultThetaMin);

// Checks the angle bounds of an isoradial map; GeometryError otherwise.
void check_angles(const IsoradialMap& m, double theta_min = kDefaultThetaMin);

// Δ• with conductances tan θ on G•, Δ° with cot θ on G°; both act on
// functions of Λ(G) (G• classes first, then G° vertices).
struct IsoLaplacian {
    Eigen::MatrixXd bullet;  // num_bullet x num_bullet
    Eigen::MatrixXd circ;    // num_circ x num_circ
    // Δ• ⊕ Δ° on Λ
    Eigen::MatrixXd direct_sum() const;
};
IsoLaplacian iso_laplacian(const DualPair& dp, const std::vector<double>& theta_per_quad);
IsoLaplacian iso_laplacian(const DualPair& dp);

// ∂_Λ as a (quads x Λ) matrix:
// [∂H](z) = 1/2 [(H(v•1)-H(v•0))/(v•1-v•0) + (H(v°1)-H(v°0))/(v°1-v°0)].
// DomainError unless the pair is isoradial.
Eigen::MatrixXcd d_lambda(const DualPair& dp);
// R = diag(r_z), r_z = |v•1 - v•0| |v°1 - v°0| / (4 delta).
Eigen::VectorXd iso_radii(const DualPair& dp);

struct IsoFactorization {
    double residual = 0;       // max row sum of |-δ^{-1}(Δ•+Δ°) - 16 ∂* R ∂| over interior rows
    double residual_bar = 0;   // same with ∂̄
    double scale = 0;          // max |entry| of the left side
    int interior_rows = 0;
};
IsoFactorization iso_factorization_check(const DualPair& dp);

// [Δ• H_F](v) for a G• class or [Δ° H_F](u) for a G° vertex (Λ index), with
// H_F increments computed from the spinor on the quads around the vertex.
// InputError if the spinor violates propagation there by more than tol.
// Conductances tan θ (G•) and cot θ (G°) with θ from the weights.
double positivity_check(const CornerSpinor& F, const IsingWeights& w, int lambda_vertex, double tol = 1e-9);

// Inner normal differences: across a wired quad H(u_in) - H(u_wired); across
// a free triangle H(u_in) - H(arc). The same-lattice difference
// H(v_in) - H(arc) next to free arcs is reported but not checked.
struct BoundaryHReport {
    double wired_max_abs = 0;
    double wired_min_normal = 0;
    double free_max_normal = 0;
    double free_max_normal_bullet = 0;  // informational
    int wired_vertices = 0, free_edges = 0;
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};
BoundaryHReport boundary_H_check(const std::vector<double>& H, const DualPair& dp, double tol = 1e-12);

} // namespace isingkit
