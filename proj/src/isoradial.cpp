#include "isingkit/isoradial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "isingkit/errors.hpp"
#include "isingkit/sholo.hpp"

namespace isingkit {

namespace {

struct QuadPoints {
    cplx b0, b1, c0, c1;
};

QuadPoints quad_points(const DualPair& dp, int z) {
    const Quad& q = dp.quad(z);
    return {dp.map().position(q.vgeo[0]), dp.map().position(q.vgeo[1]), dp.circ_pos(q.vc[0]), dp.circ_pos(q.vc[1])};
}

IsoradialMap finish(PlanarMap m, double delta, double theta_min) {
    IsoradialMap out;
    DualPair dp(m);
    IsoradialGeometry g = isoradial_geometry(dp);
    out.delta = g.delta;
    if (std::abs(g.delta - delta) > 1e-9 * delta)
        throw GeometryError("generated rhombi have side " + std::to_string(g.delta));
    out.theta.assign(m.num_edges(), std::numeric_limits<double>::quiet_NaN());
    for (int z = 0; z < dp.num_quads(); ++z) out.theta[dp.quad(z).edge] = g.theta[z];
    out.weights = critical_isoradial_weights(dp);
    out.map = std::move(m);
    check_angles(out, theta_min);
    return out;
}

} // namespace

IsoradialGeometry isoradial_geometry(const DualPair& dp, double tol) {
    IsoradialGeometry g;
    g.theta.resize(dp.num_quads());
    for (int z = 0; z < dp.num_quads(); ++z) {
        QuadPoints p = quad_points(dp, z);
        double sides[4] = {std::abs(p.b0 - p.c0), std::abs(p.b0 - p.c1), std::abs(p.b1 - p.c0), std::abs(p.b1 - p.c1)};
        if (g.delta == 0) g.delta = sides[0];
        for (double s : sides)
            if (std::abs(s - g.delta) > tol * std::max(1.0, g.delta))
                throw DomainError("quad " + std::to_string(z) + " is not a rhombus of the common side");
        g.theta[z] = std::atan2(std::abs(p.c1 - p.c0), std::abs(p.b1 - p.b0));
    }
    if (g.delta == 0) throw DomainError("no quads");
    return g;
}

bool is_isoradial(const DualPair& dp, double tol) {
    try {
        isoradial_geometry(dp, tol);
        return true;
    } catch (const DomainError&) {
        return false;
    }
}

IsingWeights critical_isoradial_weights(const DualPair& dp) {
    IsoradialGeometry g = isoradial_geometry(dp);
    IsingWeights w;
    w.x.assign(dp.map().num_edges(), 1.0);
    for (int z = 0; z < dp.num_quads(); ++z) w.x[dp.quad(z).edge] = x_from_theta(g.theta[z]);
    return w;
}

void check_angles(const IsoradialMap& m, double theta_min) {
    for (int e = 0; e < int(m.theta.size()); ++e) {
        double t = m.theta[e];
        if (std::isnan(t)) continue;
        if (t < theta_min - 1e-12 || t > M_PI / 2 - theta_min + 1e-12)
            throw GeometryError("edge " + std::to_string(e) + " has rhombus half-angle " + std::to_string(t) +
                                " outside [θmin, π/2 - θmin]");
    }
}

IsoradialMap square_lattice(double delta, int width, int height, SideTypes sides) {
    if (delta <= 0) throw InputError("delta must be positive");
    return finish(grid_map(width, height, delta * std::sqrt(2.0), sides), delta, kDefaultThetaMin);
}

IsoradialMap rhombic_lattice(const RhombicPattern& pat, int width, int height, double delta, SideTypes sides,
                             double theta_min) {
    if (pat.row_angles.empty() || pat.col_angles.empty()) throw InputError("empty angle pattern");
    if (delta <= 0) throw InputError("delta must be positive");
    auto alpha = [&](int m) {
        int k = static_cast<int>(pat.row_angles.size());
        return pat.row_angles[((m % k) + k) % k];
    };
    auto beta = [&](int n) {
        int k = static_cast<int>(pat.col_angles.size());
        return pat.col_angles[((n % k) + k) % k];
    };
    // every rhombus spanned by the two families must be nondegenerate
    const int mlo = -(height - 1) - 1, mhi = width, nhi = width + height;
    for (int m = mlo; m <= mhi; ++m)
        for (int n = 0; n <= nhi; ++n) {
            double a = beta(n) - alpha(m);
            if (!(a >= 2 * theta_min - 1e-12 && a <= M_PI - 2 * theta_min + 1e-12))
                throw GeometryError("angle pattern gives a rhombus of angle " + std::to_string(a));
        }
    auto point = [&](int m, int n) {
        cplx s = 0;
        if (m >= 0)
            for (int j = 0; j < m; ++j) s += std::polar(delta, alpha(j));
        else
            for (int j = m; j < 0; ++j) s -= std::polar(delta, alpha(j));
        for (int i = 0; i < n; ++i) s += std::polar(delta, beta(i));
        return s;
    };
    PlanarMap g = grid_map(width, height, 1.0, sides);
    std::vector<cplx> pos(g.num_vertices());
    for (int l = 0; l < height; ++l)
        for (int k = 0; k < width; ++k) pos[l * width + k] = point(k - l, k + l);
    PlanarMap m = PlanarMap::build(pos, g.edges(), g.arcs());
    return finish(std::move(m), delta, theta_min);
}

IsoradialMap triangular_lattice(int width, int height, double delta, double theta_min) {
    if (width < 2 || height < 2) throw InputError("lattice needs at least 2x2 vertices");
    const double a = delta * std::sqrt(3.0);
    const cplx om = std::polar(1.0, M_PI / 3);
    std::vector<cplx> pos;
    auto id = [&](int k, int l) { return l * width + k; };
    for (int l = 0; l < height; ++l)
        for (int k = 0; k < width; ++k) pos.push_back(a * (double(k) + double(l) * om));
    std::vector<std::array<int, 2>> edges;
    for (int l = 0; l < height; ++l)
        for (int k = 0; k < width; ++k) {
            if (k + 1 < width) edges.push_back({id(k, l), id(k + 1, l)});
            if (l + 1 < height) edges.push_back({id(k, l), id(k, l + 1)});
            if (k + 1 < width && l + 1 < height) edges.push_back({id(k + 1, l), id(k, l + 1)});
        }
    return finish(PlanarMap::build(std::move(pos), std::move(edges)), delta, theta_min);
}

Eigen::MatrixXd IsoLaplacian::direct_sum() const {
    const int B = static_cast<int>(bullet.rows()), C = static_cast<int>(circ.rows());
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(B + C, B + C);
    M.topLeftCorner(B, B) = bullet;
    M.bottomRightCorner(C, C) = circ;
    return M;
}

IsoLaplacian iso_laplacian(const DualPair& dp, const std::vector<double>& theta) {
    if (int(theta.size()) != dp.num_quads()) throw InputError("one angle per quad expected");
    IsoLaplacian L;
    L.bullet = Eigen::MatrixXd::Zero(dp.num_bullet(), dp.num_bullet());
    L.circ = Eigen::MatrixXd::Zero(dp.num_circ(), dp.num_circ());
    auto add = [](Eigen::MatrixXd& M, int i, int j, double c) {
        if (i == j) return;
        M(i, j) += c;
        M(j, i) += c;
        M(i, i) -= c;
        M(j, j) -= c;
    };
    for (int z = 0; z < dp.num_quads(); ++z) {
        const Quad& q = dp.quad(z);
        add(L.bullet, q.vb[0], q.vb[1], std::tan(theta[z]));
        add(L.circ, q.vc[0], q.vc[1], 1.0 / std::tan(theta[z]));
    }
    return L;
}

IsoLaplacian iso_laplacian(const DualPair& dp) { return iso_laplacian(dp, isoradial_geometry(dp).theta); }

Eigen::MatrixXcd d_lambda(const DualPair& dp) {
    isoradial_geometry(dp);
    Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(dp.num_quads(), dp.num_lambda());
    for (int z = 0; z < dp.num_quads(); ++z) {
        const Quad& q = dp.quad(z);
        QuadPoints p = quad_points(dp, z);
        cplx kb = 0.5 / (p.b1 - p.b0), kc = 0.5 / (p.c1 - p.c0);
        D(z, dp.lambda_bullet(q.vb[1])) += kb;
        D(z, dp.lambda_bullet(q.vb[0])) -= kb;
        D(z, dp.lambda_circ(q.vc[1])) += kc;
        D(z, dp.lambda_circ(q.vc[0])) -= kc;
    }
    return D;
}

Eigen::VectorXd iso_radii(const DualPair& dp) {
    double delta = isoradial_geometry(dp).delta;
    Eigen::VectorXd R(dp.num_quads());
    for (int z = 0; z < dp.num_quads(); ++z) {
        QuadPoints p = quad_points(dp, z);
        R(z) = std::abs(p.b1 - p.b0) * std::abs(p.c1 - p.c0) / (4 * delta);
    }
    return R;
}

IsoFactorization iso_factorization_check(const DualPair& dp) {
    IsoradialGeometry g = isoradial_geometry(dp);
    Eigen::MatrixXd lhs = -iso_laplacian(dp, g.theta).direct_sum() / g.delta;
    Eigen::MatrixXcd D = d_lambda(dp);
    Eigen::VectorXcd R = iso_radii(dp).cast<cplx>();
    Eigen::MatrixXcd rhs = 16.0 * D.adjoint() * R.asDiagonal() * D;
    Eigen::MatrixXcd Db = D.conjugate();
    Eigen::MatrixXcd rhs_bar = 16.0 * Db.adjoint() * R.asDiagonal() * Db;
    IsoFactorization f;
    f.scale = lhs.cwiseAbs().maxCoeff();
    for (int l = 0; l < dp.num_lambda(); ++l) {
        if (!lambda_is_interior(dp, l)) continue;
        ++f.interior_rows;
        f.residual = std::max(f.residual, (lhs.row(l).cast<cplx>() - rhs.row(l)).cwiseAbs().sum());
        f.residual_bar = std::max(f.residual_bar, (lhs.row(l).cast<cplx>() - rhs_bar.row(l)).cwiseAbs().sum());
    }
    return f;
}

double positivity_check(const CornerSpinor& F, const IsingWeights& w, int l, double tol) {
    const DualPair& dp = F.pair();
    Star st = star_of(dp, l);
    double scale = 0;
    for (int c : st.corners) scale = std::max(scale, std::abs(F.values[c]));
    for (int z : st.quads) {
        if (!quad_defined(F, dp.quad(z))) throw InputError("spinor undefined at quad " + std::to_string(z));
        double r = quad_residual(F, w, z);
        if (r > tol * std::max(1.0, scale))
            throw InputError("propagation fails at quad " + std::to_string(z) + " (residual " + std::to_string(r) + ")");
    }
    auto sq = [&](int c) { return F.values[c] * F.values[c]; };
    double out = 0;
    for (int z : st.quads) {
        const Quad& q = dp.quad(z);
        double th = w.quad_theta(dp, z);
        if (st.bullet) {
            int p = q.vb[0] == l ? 0 : 1;
            // H(w) - H(v) through either circ of the quad
            double inc = 0.5 * (sq(q.corner[1 - p][0]) - sq(q.corner[p][0]) + sq(q.corner[1 - p][1]) - sq(q.corner[p][1]));
            out += std::tan(th) * inc;
        } else {
            int c = l - dp.num_bullet();
            int s = q.vc[0] == c ? 0 : 1;
            double inc = 0.5 * (sq(q.corner[0][s]) - sq(q.corner[0][1 - s]) + sq(q.corner[1][s]) - sq(q.corner[1][1 - s]));
            out += inc / std::tan(th);
        }
    }
    return out;
}

BoundaryHReport boundary_H_check(const std::vector<double>& H, const DualPair& dp, double tol) {
    if (int(H.size()) != dp.num_lambda()) throw InputError("H must be given on Λ");
    BoundaryHReport rep;
    double scale = 0;
    for (double h : H) scale = std::max(scale, std::abs(h));
    const double thr = tol * std::max(1.0, scale);
    rep.wired_min_normal = std::numeric_limits<double>::infinity();
    rep.free_max_normal = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < dp.num_circ(); ++c) {
        if (!dp.circ_is_wired(c)) continue;
        ++rep.wired_vertices;
        double hw = H[dp.lambda_circ(c)];
        rep.wired_max_abs = std::max(rep.wired_max_abs, std::abs(hw));
        if (std::abs(hw) > thr) rep.violations.push_back("H != 0 at wired G° vertex " + std::to_string(c));
        int z = dp.quad_of_edge(dp.circ_edge(c));
        if (z < 0) continue;
        const Quad& q = dp.quad(z);
        int in = q.vc[0] == c ? q.vc[1] : q.vc[0];
        if (dp.circ_is_wired(in)) continue;
        double nd = H[dp.lambda_circ(in)] - hw;
        rep.wired_min_normal = std::min(rep.wired_min_normal, nd);
        if (nd < -thr) rep.violations.push_back("inner normal derivative < 0 at wired G° vertex " + std::to_string(c));
    }
    const PlanarMap& m = dp.map();
    for (int e = 0; e < m.num_edges(); ++e) {
        if (!dp.edge_is_free(e)) continue;
        int b = dp.bullet_of(m.edge(e)[0]);
        int in = -1;
        for (int h : {2 * e, 2 * e + 1})
            if (m.face(h) != m.outer_face()) in = dp.face_circ(m.face(h));
        if (in < 0) continue;
        ++rep.free_edges;
        double nd = H[dp.lambda_circ(in)] - H[dp.lambda_bullet(b)];
        rep.free_max_normal = std::max(rep.free_max_normal, nd);
        if (nd > thr) rep.violations.push_back("inner normal derivative > 0 at free edge " + std::to_string(e));
    }
    rep.free_max_normal_bullet = -std::numeric_limits<double>::infinity();
    for (int z = 0; z < dp.num_quads(); ++z) {
        const Quad& q = dp.quad(z);
        for (int p = 0; p < 2; ++p) {
            int b = q.vb[p], in = q.vb[1 - p];
            if (!dp.bullet_is_macro(b) || in == b || dp.bullet_is_macro(in)) continue;
            rep.free_max_normal_bullet =
                std::max(rep.free_max_normal_bullet, H[dp.lambda_bullet(in)] - H[dp.lambda_bullet(b)]);
        }
    }
    if (std::isinf(rep.free_max_normal_bullet)) rep.free_max_normal_bullet = 0;
    if (rep.wired_vertices == 0) rep.wired_min_normal = 0;
    if (rep.free_edges == 0) rep.free_max_normal = 0;
    return rep;
}

} // namespace isingkit
