#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "isingkit/planar_map.hpp"

namespace isingkit {

using Shift = std::array<int, 2>;

// Fundamental domain of a doubly-periodic planar graph: edge (u, v, shift)
// joins u to the copy of v translated by shift[0]*period[0] + shift[1]*period[1].
struct PeriodicMap {
    struct Edge {
        int u = -1, v = -1;
        Shift shift{0, 0};
    };
    std::vector<cplx> pos;
    std::vector<Edge> edges;
    std::array<cplx, 2> period{cplx(1, 0), cplx(0, 1)};

    int num_vertices() const { return static_cast<int>(pos.size()); }
    int num_edges() const { return static_cast<int>(edges.size()); }
    cplx translate(const Shift& s) const { return double(s[0]) * period[0] + double(s[1]) * period[1]; }

    // w x h block of the square lattice, spacing 1.
    static PeriodicMap square(int w = 1, int h = 1);
    // Triangular lattice (one vertex, three edges per domain for w = h = 1).
    static PeriodicMap triangular(int w = 1, int h = 1);
};

// Torus version of the pair (G•, G°): faces from the rotation system, corners
// as (vertex, face) angles, one quad per edge. Lifts are recorded as shifts
// relative to the quad's v•0 in the base domain.
class TorusPair {
public:
    struct TQuad {
        int edge = -1;
        std::array<int, 2> vb{}, vc{};       // vertex ids, face ids
        std::array<Shift, 2> sb{}, sc{};     // lifts of v•p, v°q
        std::array<std::array<int, 2>, 2> corner{};
    };
    struct TCorner {
        int vertex = -1, face = -1;
        Shift face_shift{0, 0};  // face lift when the vertex sits in the base domain
        cplx vec;                // v(c) - u(c)
    };

    explicit TorusPair(PeriodicMap m);

    const PeriodicMap& map() const { return map_; }
    int num_vertices() const { return map_.num_vertices(); }
    int num_faces() const { return static_cast<int>(face_pos_.size()); }
    int num_lambda() const { return num_vertices() + num_faces(); }
    int num_corners() const { return static_cast<int>(corners_.size()); }
    int num_quads() const { return static_cast<int>(quads_.size()); }
    const TQuad& quad(int z) const { return quads_[z]; }
    const TCorner& corner(int c) const { return corners_[c]; }
    cplx face_pos(int f) const { return face_pos_[f]; }
    int lambda_face(int f) const { return num_vertices() + f; }
    // Sheet sign between two corners of quad z (geometric continuation of η).
    int transport(int z, int a, int b) const;
    // Dirac-frame value ς |v - u|^{1/2} η̄_c.
    cplx dirac_value(int c) const;

private:
    PeriodicMap map_;
    std::vector<cplx> face_pos_;
    std::vector<TCorner> corners_;
    std::vector<TQuad> quads_;
};

struct PeriodicKernel {
    int dimension = 0;
    std::vector<double> singular_values;  // ascending
    double gap = 0;       // σ_{k+1}/σ_k across the kernel boundary
    double threshold = 0; // 1e-8 σ_max
    // Present when dimension == 2; aligned with the Dirac-frame pair when possible.
    std::vector<double> F1, F2;
    bool dirac_aligned = false;
};
// Kernel of the periodic propagation system; x per edge of the fundamental domain.
PeriodicKernel periodic_kernel(const TorusPair& tp, const std::vector<double>& x, double rel_tol = 1e-8);
// Propagation matrix (4 rows per quad, one column per corner).
Eigen::MatrixXd periodic_propagation_matrix(const TorusPair& tp, const std::vector<double>& x);

// S = H_{F1 + κ F2} on the universal cover: values on the fundamental Λ and
// the two period vectors.
struct PeriodicSEmbedding {
    const TorusPair* tp = nullptr;
    std::vector<double> x;
    cplx kappa;
    std::vector<cplx> F;   // per corner
    std::vector<cplx> S;   // Λ: vertices then faces
    std::array<cplx, 2> periods{};
    cplx tau;              // periods[1] / periods[0]
    std::vector<cplx> Sz;
    double closure = 0;

    // Images of (v•0, v°0, v•1, v°1) for quad z.
    std::array<cplx, 4> quad_points(int z) const;
};
PeriodicSEmbedding build_periodic_sembedding(const TorusPair& tp, const std::vector<double>& x, const PeriodicKernel& k,
                                             cplx kappa);

// Periods of L_S and the scale-free defect |periods| / mean |F|^2.
struct LPeriod {
    std::array<double, 2> periods{};
    double defect = 0;
};
LPeriod l_period(const TorusPair& tp, const PeriodicKernel& k, cplx kappa);

struct KappaSearch {
    cplx kappa;
    double defect = 0;
    cplx kappa_closed_form;  // from the linear dependence of the periods on (1, Re κ, |κ|^2)
    double defect_closed_form = 0;
    int starts = 0;
    bool found = false;  // defect <= 1e-6
};
KappaSearch find_kappa_L(const TorusPair& tp, const PeriodicKernel& k);

// Δ_S on periodic functions of Λ and the per-quad coefficients.
struct PeriodicLaplacian {
    Eigen::MatrixXd M;
    Eigen::VectorXd coefficients;  // (a•, a°) per quad, then b per corner
};
PeriodicLaplacian periodic_s_laplacian(const PeriodicSEmbedding& S);
// ∂̄_S on periodic functions (quads x Λ); scale = largest coefficient before
// coinciding lifts are summed.
Eigen::MatrixXcd periodic_dbar(const PeriodicSEmbedding& S, double* scale = nullptr);

struct ProjectiveCheck {
    double scale = 0;      // fitted c with coefficients(κ') ≈ c coefficients(κ)
    double deviation = 0;  // max |coef' - c coef| / max |coef'|
};
ProjectiveCheck projective_invariance(const PeriodicSEmbedding& a, const PeriodicSEmbedding& b);

struct PeriodicProperness {
    bool proper = false;
    bool conjugate = false;   // all quads clockwise
    double area_defect = 0;   // |Σ quad areas| - |period cell area|, relative
    double tangential_max = 0;
};
PeriodicProperness periodic_properness(const PeriodicSEmbedding& S);

// Singular values below rel_tol * max(σ_max, scale) count as zero.
int numerical_kernel_dim(const Eigen::MatrixXcd& A, double rel_tol = 1e-8, double scale = 0);

struct HarnessReport {
    PeriodicKernel kernel;
    KappaSearch kappa;
    cplx tau_at_kappa_L;
    struct GridPoint {
        cplx kappa;
        bool proper = false, conjugate = false;
        double area_defect = 0;
    };
    std::vector<GridPoint> grid;
    int laplacian_kernel_dim = -1;
    int dbar_kernel_dim_at_L = -1;
    int dbar_kernel_dim_off_L = -1;
    double rho_defect = -1;     // least-squares defect of Δ_S ρ = -Δ_S S^2
    double rho_norm = -1;
    double projective_deviation = -1;
    std::string note;
};
HarnessReport conjecture_harness(const TorusPair& tp, const std::vector<double>& x);

// Minimizes the smallest singular value of the propagation system over
// x[edge] in [lo, hi] (Brent); x[edge] is set to the minimizer.
struct TuneResult {
    double x = 0;
    double sigma_min = 0, sigma_second = 0, sigma_third = 0;
    int dimension = 0;
};
TuneResult tune_to_criticality(const TorusPair& tp, std::vector<double>& x, int edge, double lo, double hi);

} // namespace isingkit
