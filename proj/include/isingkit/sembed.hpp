#pragma once

#include <array>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "isingkit/cover.hpp"
#include "isingkit/dual_pair.hpp"
#include "isingkit/sholo.hpp"
#include "isingkit/spinor.hpp"
#include "isingkit/weights.hpp"

namespace isingkit {

// S on Λ(G) (G• classes, then G°) and on quad centers.
struct SEmbedding {
    const DualPair* dp = nullptr;
    std::vector<cplx> S;
    std::vector<cplx> Sz;
    IsingWeights weights;
    ComplexCornerSpinor F;   // set when built from spinors
    bool has_spinor = false;
    double center_mismatch = 0;  // spread of the four center formulas

    cplx at(int lambda) const { return S[lambda]; }
    cplx bullet(int z, int p) const { return S[dp->lambda_bullet(dp->quad(z).vb[p])]; }
    cplx circ(int z, int q) const { return S[dp->lambda_circ(dp->quad(z).vc[q])]; }
};

// F = F1 + i F2, S = H_F; centers by
//   S(v•p) - S(z) = cos θ F(c_p0) F(c_p1),  S(z) - S(v°q) = sin θ F(c_0q) F(c_1q)
// with both factors on one sheet. DegenerateSpinorError when F1, F2 are
// linearly dependent; NonIntegrableError when propagation fails.
SEmbedding build_sembedding(const DualPair& dp, const IsingWeights& w, const CornerSpinor& F1, const CornerSpinor& F2,
                            int base_lambda = -1, double tol = 1e-10);
SEmbedding build_sembedding(const DualPair& dp, const IsingWeights& w, const ComplexCornerSpinor& F,
                            int base_lambda = -1, double tol = 1e-10);
// Positions only (for hand-built or reverse use); centers are the incenters.
SEmbedding sembedding_from_positions(const DualPair& dp, std::vector<cplx> S);

// Dirac pair Re/Im of ς δ^{1/2} η̄ on a chi cover, scaled so that
// F(c)^2 = v(c) - u(c) whenever |v(c) - u(c)| = δ.
std::array<CornerSpinor, 2> dirac_pair(std::shared_ptr<const DoubleCover> cover, double delta);
// Orthogonal projection of a spinor onto the propagation nullspace for w.
CornerSpinor project_sholo(const CornerSpinor& F, const IsingWeights& w);

struct PerturbedInstance {
    IsingWeights weights;
    std::shared_ptr<const DoubleCover> cover;
    CornerSpinor F1, F2;
};
// θ_e -> θ_e + eps U(-1, 1) on every quad edge, Dirac pair projected onto the
// new s-holomorphic space.
PerturbedInstance perturbed_instance(const DualPair& dp, const IsingWeights& w, double eps, std::mt19937_64& rng);

struct QuadGeometry {
    double r = 0;
    std::array<double, 2> phi_bullet{}, phi_circ{};  // half-angles at v•p, v°q
    cplx center;
    double angle_sum_residual = 0;   // |Σφ - π|
    double distance_residual = 0;    // max ||S(v) - S(z)| - r / sin φ_v|
};
// GeometryError for degenerate image quads.
QuadGeometry quad_geometry(const SEmbedding& S, int z);
// Same from the four images (v•0, v°0, v•1, v°1); a NaN center means the incenter.
QuadGeometry quad_geometry(const std::array<cplx, 4>& pts, cplx center);

// Per-quad pieces of Δ_S: a between the two G• and the two G° vertices, and
// the quad's share of b for corner c_pq.
struct QuadCoefficients {
    double a_bullet = 0, a_circ = 0;
    std::array<std::array<double, 2>, 2> b{};
};
QuadCoefficients quad_coefficients(const QuadGeometry& g, double theta);

// Row of ∂̄_S at one quad, coefficients in the order (v•0, v°0, v•1, v°1).
struct DbarRow {
    std::array<cplx, 4> coef{};
    cplx mu;
};
DbarRow dbar_row(const std::array<cplx, 4>& pts, cplx center);

struct ProperReport {
    bool proper = true;
    int quads = 0;
    double min_area = 0;
    double tangential_max = 0;
    std::vector<std::string> violations;
    std::vector<int> bad_quads;
};
ProperReport properness_check(const SEmbedding& S, double tol = 1e-12);

struct RecoveredWeights {
    IsingWeights weights;
    std::vector<double> theta;      // per quad, from the cot form
    std::vector<double> theta_alt;  // per quad, from the sin form
    double form_mismatch = 0;       // max |tan θ - tan θ_alt|
    ComplexCornerSpinor F;          // F(c) = (S(v•(c)) - S(v°(c)))^{1/2}
    double square_residual = 0;     // max |F(c)^2 - ΔS(c)|
    double propagation_residual = 0;
};
// SheetError when the square roots cannot be made consistent on Υ×.
RecoveredWeights recover_weights(const SEmbedding& S);

struct SLaplacian {
    Eigen::MatrixXd M;                  // Λ x Λ
    std::vector<double> a_bullet;       // per quad
    std::vector<double> a_circ;         // per quad
    std::vector<double> b;              // per corner (summed over its quads)
    std::vector<char> b_complete;       // both quads of the corner present
};
// θ taken from S.weights.
SLaplacian s_laplacian(const SEmbedding& S);

// Star coefficients from |F| and the half-angles around a G• vertex (and
// the analogous ones around G°), index s = quads around the vertex.
struct LocalForm {
    std::vector<int> quads;
    std::vector<double> a_same;   // a between the vertex and its same-lattice neighbour across quad s
    std::vector<double> a_other;  // a between the two opposite-lattice vertices of quad s
    std::vector<double> b;        // b with the opposite-lattice vertex between quads s and s+1
};
LocalForm local_form(const SEmbedding& S, int lambda_vertex);

struct SubharmonicResult {
    double value = 0;
    bool equality = false;
    double span_residual = 0;  // relative distance of F|star to span{F1, F2}
};
// [Δ_S H_F](v) for a real spinor F defined on the quads around v.
SubharmonicResult subharmonicity_check(const SEmbedding& S, const SLaplacian& L, const CornerSpinor& F, int lambda_vertex,
                                       double tol = 1e-9, double rank_tol = 1e-8);
// Matrix Q with [Δ_S H_F](v) = x^T Q x, x = F on the corners at v.
Eigen::MatrixXd subharmonic_form(const SEmbedding& S, const SLaplacian& L, int lambda_vertex);

struct DbarS {
    Eigen::MatrixXcd D;   // quads x Λ
    Eigen::VectorXcd mu;
    Eigen::VectorXd r;
    Eigen::MatrixXcd d() const { return D.conjugate(); }  // ∂_S H = conj(∂̄_S conj H)
    Eigen::VectorXcd apply(const Eigen::VectorXcd& H) const { return D * H; }
};
DbarS dbar_S(const SEmbedding& S);

struct DbarChecks {
    double one = 0, S = 0, Sbar = 0, L = 0;  // max |∂̄_S 1|, |∂̄_S S|, |∂̄_S S̄ - 1|, |∂̄_S L_S|
};
DbarChecks dbar_checks(const SEmbedding& S);

std::vector<double> L_S(const SEmbedding& S, int base_lambda = -1, double tol = 1e-10);

// With ∂_S* the conjugate transpose of the matrix of ∂_S, the identity that
// holds is Δ_S = -16 ∂_S* U^{-1} R ∂̄_S (and its conjugate form); the
// residual of the +16 form is kept for reference.
struct FactorizationS {
    double residual = 0;      // Δ_S + 16 ∂_S* U^{-1} R ∂̄_S on interior rows (max row l1 norm)
    double residual_bar = 0;  // Δ_S + 16 ∂̄_S* Ū^{-1} R ∂_S
    double residual_plus = 0; // max of the two with +16
    double scale = 0;
    int interior_rows = 0;
};
FactorizationS factorization_S_check(const SEmbedding& S, const SLaplacian& L);

struct HarmonicConjugate {
    std::vector<double> H2;
    double residual = 0;  // max |∂̄_S (H1 + i H2)|
    int kernel_dim = 0;   // dimension of the solution set (1 = constants only)
};
// InputError when no real H2 solves ∂̄_S (H1 + i H2) = 0 within tol.
HarmonicConjugate harmonic_conjugate(const SEmbedding& S, const std::vector<double>& H1, double tol = 1e-8);

// Rows of interior Λ vertices.
std::vector<int> interior_lambda(const DualPair& dp);

} // namespace isingkit
