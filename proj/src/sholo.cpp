#include "isingkit/sholo.hpp"

#include <algorithm>

#include "isingkit/isoradial.hpp"

namespace isingkit {

namespace {

// Position of corner c in the cyclic order c00, c10, c11, c01.
int cyc_index(const Quad& q, int c) {
    const int order[4] = {q.corner[0][0], q.corner[1][0], q.corner[1][1], q.corner[0][1]};
    for (int i = 0; i < 4; ++i)
        if (order[i] == c) return i;
    throw InputError("corner " + std::to_string(c) + " is not in quad " + std::to_string(q.z));
}

int common_quad(const DualPair& dp, int a, int b) {
    for (int za : dp.corner(a).quads)
        if (za >= 0)
            for (int zb : dp.corner(b).quads)
                if (za == zb) return za;
    return -1;
}

} // namespace

cplx psi_lift(const CornerSpinor& X, int from, int c, const Quad& q) {
    const DualPair& dp = X.pair();
    const DoubleCover& cv = *X.cover;
    const DiracPhase* dir = cv.dirac();
    if (!dir) throw InputError("psi values need a chi cover with Dirac phases");
    const int order[4] = {q.corner[0][0], q.corner[1][0], q.corner[1][1], q.corner[0][1]};
    int i = cyc_index(q, from), j = cyc_index(q, c);
    int sign = 1;
    // walk forward around the quad; within a quad either direction gives the same ψ-sheet
    for (int t = i; t != j; t = (t + 1) % 4) {
        int k = dp.ups_edge_between(order[t], order[(t + 1) % 4]);
        sign *= cv.cut_sign(k);
    }
    return double(sign) * dir->eta(c) * X.values[c];
}

DiamondObservable complex_observable(const CornerSpinor& X) {
    const DualPair& dp = X.pair();
    if (!X.cover->dirac() || !X.cover->dirac()->geometric())
        throw GeometryError("complex observable needs geometric Dirac phases");
    DiamondObservable obs;
    obs.values.assign(dp.num_quads(), 0.0);
    obs.alternate.assign(dp.num_quads(), 0.0);
    for (int z = 0; z < dp.num_quads(); ++z) {
        const Quad& q = dp.quad(z);
        if (!quad_defined(X, q)) continue;
        int c00 = q.corner[0][0];
        cplx f = psi_lift(X, c00, c00, q) + psi_lift(X, c00, q.corner[1][1], q);
        cplx g = psi_lift(X, c00, q.corner[0][1], q) + psi_lift(X, c00, q.corner[1][0], q);
        obs.values[z] = f;
        obs.alternate[z] = g;
        obs.diagonal_mismatch = std::max(obs.diagonal_mismatch, std::abs(f - g));
        for (int p = 0; p < 2; ++p)
            for (int s = 0; s < 2; ++s) {
                int c = q.corner[p][s];
                cplx eta = X.cover->dirac()->eta(c);
                cplx pr = eta * std::real(std::conj(eta) * f);
                obs.projection_residual = std::max(obs.projection_residual, std::abs(pr - psi_lift(X, c00, c, q)));
            }
    }
    return obs;
}

std::vector<cplx> d_lambda_apply(const DualPair& dp, const std::vector<double>& H) {
    Eigen::MatrixXcd D = d_lambda(dp);
    Eigen::VectorXcd h = Eigen::Map<const Eigen::VectorXd>(H.data(), H.size()).cast<cplx>();
    Eigen::VectorXcd r = D * h;
    return std::vector<cplx>(r.data(), r.data() + r.size());
}

Eigen::VectorXcd cr_defect(const DualPair& dp, const std::vector<cplx>& Fz, const std::vector<int>& skip) {
    Eigen::MatrixXcd D = d_lambda(dp);
    Eigen::VectorXd R = iso_radii(dp);
    Eigen::VectorXcd f = Eigen::Map<const Eigen::VectorXcd>(Fz.data(), Fz.size());
    Eigen::VectorXcd out = D.adjoint() * (R.cast<cplx>().asDiagonal() * f);
    for (int l = 0; l < dp.num_lambda(); ++l)
        if (!lambda_is_interior(dp, l) || std::find(skip.begin(), skip.end(), l) != skip.end()) out(l) = 0;
    return out;
}

Eigen::VectorXcd cr_defect(const CornerSpinor& X, const std::vector<int>& skip) {
    const DualPair& dp = X.pair();
    Eigen::MatrixXcd D = d_lambda(dp);
    Eigen::VectorXd R = iso_radii(dp);
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dp.num_lambda());
    for (int l = 0; l < dp.num_lambda(); ++l) {
        if (!lambda_is_interior(dp, l) || std::find(skip.begin(), skip.end(), l) != skip.end()) continue;
        Star st = star_of(dp, l);
        const int n = static_cast<int>(st.corners.size());
        int sheet = 1;
        cplx acc = 0;
        for (int s = 0; s < n; ++s) {
            int c = st.corners[s];
            const Quad& q = dp.quad(st.quads[s]);
            if (!quad_defined(X, q)) throw InputError("spinor undefined around Λ vertex " + std::to_string(l));
            cplx f = psi_lift(X, c, q.corner[0][0], q) + psi_lift(X, c, q.corner[1][1], q);
            acc += double(sheet) * std::conj(D(q.z, l)) * R(q.z) * f;
            if (s + 1 < n) sheet *= X.cover->cut_sign(dp.ups_edge_between(c, st.corners[s + 1]));
        }
        out(l) = acc;
    }
    return out;
}

Eigen::MatrixXd sholo_basis(const DoubleCover& cover, const IsingWeights& w, double rel_tol) {
    const DualPair& dp = cover.pair();
    const int C = dp.num_corners(), Q = dp.num_quads();
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(4 * Q, C);
    for (int z = 0; z < Q; ++z) {
        const Quad& q = dp.quad(z);
        double th = w.quad_theta(dp, z);
        int row = 4 * z;
        for (int p = 0; p < 2; ++p)
            for (int s = 0; s < 2; ++s, ++row) {
                int c = q.corner[p][s], b = q.corner[p][1 - s], d = q.corner[1 - p][s];
                M(row, c) += 1;
                M(row, b) -= cover.transport(c, b) * std::cos(th);
                M(row, d) -= cover.transport(c, d) * std::sin(th);
            }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    double smax = sv.size() ? sv(0) : 0;
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > rel_tol * std::max(smax, 1.0)) ++rank;
    return svd.matrixV().rightCols(C - rank);
}

bool lambda_is_interior(const DualPair& dp, int l) {
    if (l < dp.num_bullet()) return dp.bullet_is_interior(l);
    return dp.circ_is_interior(l - dp.num_bullet());
}

Star star_of(const DualPair& dp, int l) {
    if (!lambda_is_interior(dp, l)) throw InputError("Λ vertex " + std::to_string(l) + " is not interior");
    Star st;
    st.lambda = l;
    st.bullet = l < dp.num_bullet();
    st.corners = st.bullet ? dp.corners_around_bullet(l) : dp.corners_around_circ(l - dp.num_bullet());
    const int n = static_cast<int>(st.corners.size());
    for (int s = 0; s < n; ++s) {
        int z = common_quad(dp, st.corners[s], st.corners[(s + 1) % n]);
        if (z < 0) throw InputError("corners around Λ vertex " + std::to_string(l) + " are not linked by quads");
        st.quads.push_back(z);
    }
    return st;
}

CornerSpinor random_local_spinor(std::shared_ptr<const DoubleCover> cover, const IsingWeights& w, int l,
                                 std::mt19937_64& rng) {
    const DualPair& dp = cover->pair();
    Star st = star_of(dp, l);
    CornerSpinor F = make_spinor<double>(std::move(cover));
    F.defined.assign(dp.num_corners(), 0);
    std::normal_distribution<double> nd;
    for (int c : st.corners) {
        F.values[c] = nd(rng);
        F.defined[c] = 1;
    }
    for (int z : st.quads) complete_quad(F, w, z);
    return F;
}

} // namespace isingkit
