#pragma once

#include <cmath>
#include <complex>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "isingkit/cover.hpp"
#include "isingkit/errors.hpp"
#include "isingkit/spinor.hpp"
#include "isingkit/weights.hpp"

namespace isingkit {

// ---------------------------------------------------------------------------
// Propagation equation on a quad z with corners c_pq:
//   F(c_pq) = F(c_{p,1-q}) cos θ + F(c_{1-p,q}) sin θ,
// neighbours continued onto the sheet of c_pq.

template <class T>
T propagation_residual(const CornerSpinorT<T>& F, double theta, const Quad& q, int p, int s) {
    int c = q.corner[p][s];
    int same_bullet = q.corner[p][1 - s];
    int same_circ = q.corner[1 - p][s];
    return F.values[c] - F.lift(c, same_bullet) * std::cos(theta) - F.lift(c, same_circ) * std::sin(theta);
}

template <class T>
bool quad_defined(const CornerSpinorT<T>& F, const Quad& q) {
    for (int p = 0; p < 2; ++p)
        for (int s = 0; s < 2; ++s)
            if (!F.is_defined(q.corner[p][s])) return false;
    return true;
}

// Largest of the four residuals at quad z.
template <class T>
double quad_residual(const CornerSpinorT<T>& F, const IsingWeights& w, int z) {
    const Quad& q = F.pair().quad(z);
    double th = w.quad_theta(F.pair(), z), r = 0;
    for (int p = 0; p < 2; ++p)
        for (int s = 0; s < 2; ++s) r = std::max(r, double(std::abs(propagation_residual(F, th, q, p, s))));
    return r;
}

struct PropagationReport {
    double max_residual = 0;
    int worst_quad = -1;
    int checked = 0;
};

// All quads with four defined corners, or the listed ones.
template <class T>
PropagationReport check_propagation(const CornerSpinorT<T>& F, const IsingWeights& w,
                                    const std::vector<int>& quads = {}) {
    PropagationReport rep;
    const DualPair& dp = F.pair();
    auto visit = [&](int z) {
        if (!quad_defined(F, dp.quad(z))) return;
        double r = quad_residual(F, w, z);
        ++rep.checked;
        if (r > rep.max_residual || rep.worst_quad < 0) {
            rep.max_residual = std::max(rep.max_residual, r);
            rep.worst_quad = z;
        }
    };
    if (quads.empty())
        for (int z = 0; z < dp.num_quads(); ++z) visit(z);
    else
        for (int z : quads) visit(z);
    return rep;
}

// Scalar form: value at c_pq from the same-bullet and same-circ neighbours.
template <class T>
T propagate(T same_bullet, T same_circ, double theta) {
    return same_bullet * std::cos(theta) + same_circ * std::sin(theta);
}

// Fills the undefined corners of quad z from (at least two) defined ones by
// solving the four propagation equations. NonIntegrableError if the defined
// values already violate them, InputError if too few are known.
template <class T>
void complete_quad(CornerSpinorT<T>& F, const IsingWeights& w, int z, double tol = 1e-10) {
    using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
    using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;
    const DualPair& dp = F.pair();
    const Quad& q = dp.quad(z);
    const double th = w.quad_theta(dp, z);
    const double cs = std::cos(th), sn = std::sin(th);
    std::array<int, 4> cs4{q.corner[0][0], q.corner[1][0], q.corner[1][1], q.corner[0][1]};
    auto slot = [&](int c) {
        for (int i = 0; i < 4; ++i)
            if (cs4[i] == c) return i;
        return -1;
    };
    Mat M = Mat::Zero(4, 4);
    int row = 0;
    for (int p = 0; p < 2; ++p)
        for (int s = 0; s < 2; ++s, ++row) {
            int c = q.corner[p][s], b = q.corner[p][1 - s], d = q.corner[1 - p][s];
            M(row, slot(c)) += T(1);
            M(row, slot(b)) -= T(F.cover->transport(c, b) * cs);
            M(row, slot(d)) -= T(F.cover->transport(c, d) * sn);
        }
    if (F.defined.empty()) F.defined.assign(dp.num_corners(), 1);
    std::vector<int> known, unknown;
    for (int i = 0; i < 4; ++i) (F.defined[cs4[i]] ? known : unknown).push_back(i);
    if (unknown.empty()) {
        if (quad_residual(F, w, z) > tol) throw NonIntegrableError("quad " + std::to_string(z) + " violates propagation");
        return;
    }
    if (known.size() < 2) throw InputError("quad " + std::to_string(z) + " needs two known corners");
    Mat A(4, unknown.size());
    Vec rhs = Vec::Zero(4);
    for (size_t j = 0; j < unknown.size(); ++j) A.col(j) = M.col(unknown[j]);
    double scale = 0;
    for (int i : known) {
        rhs -= M.col(i) * F.values[cs4[i]];
        scale = std::max(scale, double(std::abs(F.values[cs4[i]])));
    }
    auto qr = A.colPivHouseholderQr();
    if (qr.rank() < int(unknown.size())) throw InputError("quad " + std::to_string(z) + " is underdetermined");
    Vec x = qr.solve(rhs);
    double res = (A * x - rhs).cwiseAbs().maxCoeff();
    if (res > tol * std::max(1.0, scale))
        throw NonIntegrableError("quad " + std::to_string(z) + ": known corners are inconsistent (residual " +
                                 std::to_string(res) + ")");
    for (size_t j = 0; j < unknown.size(); ++j) {
        F.values[cs4[unknown[j]]] = x(j);
        F.defined[cs4[unknown[j]]] = 1;
    }
}

// ---------------------------------------------------------------------------
// H_F on Λ(G): H(v•(c)) - H(v°(c)) = F(c)^2.

template <class T>
struct HFunctionT {
    std::vector<T> values;       // indexed by Λ (G• classes, then G°)
    std::vector<char> defined;
    int base = -1;
    double closure = 0;          // largest mismatch on a closing corner
    int components = 0;
};
using HFunction = HFunctionT<double>;
using ComplexHFunction = HFunctionT<cplx>;

// Breadth-first integration over the defined corners. The base defaults to
// the first wired G° vertex (value base_value); further components start at
// 0. NonIntegrableError when a closing corner misses by more than
// tol * (1 + max |F|^2).
template <class T>
HFunctionT<T> integrate_HF(const CornerSpinorT<T>& F, int base_lambda = -1, T base_value = T(0),
                           double tol = 1e-12) {
    const DualPair& dp = F.pair();
    const int L = dp.num_lambda(), C = dp.num_corners();
    HFunctionT<T> H;
    H.values.assign(L, T(0));
    H.defined.assign(L, 0);
    std::vector<std::vector<int>> at(L);
    double fmax = 0;
    for (int c = 0; c < C; ++c) {
        if (!F.is_defined(c)) continue;
        at[dp.lambda_bullet(dp.corner(c).vb)].push_back(c);
        at[dp.lambda_circ(dp.corner(c).vc)].push_back(c);
        fmax = std::max(fmax, double(std::norm(F.values[c])));
    }
    if (base_lambda < 0 && dp.first_wired_circ() >= 0) base_lambda = dp.lambda_circ(dp.first_wired_circ());
    const double thr = tol * (1.0 + fmax);
    auto run = [&](int s, T v0) {
        H.values[s] = v0;
        H.defined[s] = 1;
        ++H.components;
        std::queue<int> qu;
        qu.push(s);
        while (!qu.empty()) {
            int a = qu.front();
            qu.pop();
            for (int c : at[a]) {
                int lb = dp.lambda_bullet(dp.corner(c).vb), lc = dp.lambda_circ(dp.corner(c).vc);
                T f2 = F.values[c] * F.values[c];
                int other = a == lb ? lc : lb;
                T want = a == lb ? H.values[a] - f2 : H.values[a] + f2;
                if (!H.defined[other]) {
                    H.values[other] = want;
                    H.defined[other] = 1;
                    qu.push(other);
                } else {
                    double mis = std::abs(H.values[other] - want);
                    H.closure = std::max(H.closure, mis);
                    if (mis > thr)
                        throw NonIntegrableError("H_F does not close at corner " + std::to_string(c) +
                                                 " (mismatch " + std::to_string(mis) + ")");
                }
            }
        }
    };
    if (base_lambda >= 0 && !at[base_lambda].empty()) {
        H.base = base_lambda;
        run(base_lambda, base_value);
    }
    for (int s = 0; s < L; ++s)
        if (!H.defined[s] && !at[s].empty()) {
            if (H.base < 0) {
                H.base = s;
                run(s, base_value);
            } else {
                run(s, T(0));
            }
        }
    return H;
}

// ---------------------------------------------------------------------------
// Complex observable on quads: F(z) = ψ(c00) + ψ(c11), ψ_c = η_c X(c), with
// every value continued onto the ψ-sheet of c00. Needs a geometric Dirac phase.
struct DiamondObservable {
    std::vector<cplx> values;      // from (c00, c11)
    std::vector<cplx> alternate;   // from (c01, c10)
    double diagonal_mismatch = 0;  // max |values - alternate|
    double projection_residual = 0;  // max |η_c Re(η̄_c F(z)) - ψ_c| over quad corners
};

// ψ_c continued from corner `from` (in the same quad) onto its sheet.
cplx psi_lift(const CornerSpinor& X, int from, int c, const Quad& q);
DiamondObservable complex_observable(const CornerSpinor& X);

// Discrete Cauchy-Riemann defect of a quad function on an isoradial pair:
// (∂_Λ)* R F on Λ, where ∂_Λ and R come from module isoradial. Rows of
// boundary Λ vertices and of `skip_lambda` are set to 0.
Eigen::VectorXcd cr_defect(const DualPair& dp, const std::vector<cplx>& Fz, const std::vector<int>& skip_lambda = {});
// Same for the observable of a real spinor: around each Λ vertex the values
// F(z) are continued onto one ψ-sheet before summing.
Eigen::VectorXcd cr_defect(const CornerSpinor& X, const std::vector<int>& skip_lambda = {});
// ∂_Λ H per quad.
std::vector<cplx> d_lambda_apply(const DualPair& dp, const std::vector<double>& H);

// ---------------------------------------------------------------------------
// Spinor spaces.

// Orthonormal basis (columns, reference-sheet values) of the real spinors on
// the cover that satisfy propagation on every quad.
Eigen::MatrixXd sholo_basis(const DoubleCover& cover, const IsingWeights& w, double rel_tol = 1e-9);

// Random values on the corners at a Λ vertex, completed quad by quad; only
// the corners of the quads around the vertex are defined.
CornerSpinor random_local_spinor(std::shared_ptr<const DoubleCover> cover, const IsingWeights& w,
                                 int lambda_vertex, std::mt19937_64& rng);
// Corners at a Λ vertex (counterclockwise) and the quads around it, in
// matching order: quads[s] contains corners[s] and corners[s+1].
struct Star {
    int lambda = -1;
    bool bullet = true;
    std::vector<int> corners;
    std::vector<int> quads;
};
Star star_of(const DualPair& dp, int lambda_vertex);
bool lambda_is_interior(const DualPair& dp, int lambda_vertex);

} // namespace isingkit
