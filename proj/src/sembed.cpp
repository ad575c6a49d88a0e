#include "isingkit/sembed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>

#include "isingkit/errors.hpp"
#include "isingkit/isoradial.hpp"

namespace isingkit {

namespace bg = boost::geometry;

namespace {

using BgPoint = bg::model::d2::point_xy<double>;
using BgPolygon = bg::model::polygon<BgPoint, false, true>;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// arg in (0, 2π]
double arg_pos(cplx w) {
    double a = std::arg(w);
    return a <= 0 ? a + 2 * M_PI : a;
}

struct QuadPts {
    std::array<cplx, 2> B, C;
};

QuadPts quad_pts(const SEmbedding& S, int z) {
    return {{S.bullet(z, 0), S.bullet(z, 1)}, {S.circ(z, 0), S.circ(z, 1)}};
}

double quad_scale(const QuadPts& P) {
    double s = 0;
    for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q) s = std::max(s, std::abs(P.B[p] - P.C[q]));
    return s;
}

void half_angles(const QuadPts& P, std::array<double, 2>& pb, std::array<double, 2>& pc) {
    for (int p = 0; p < 2; ++p) pb[p] = 0.5 * arg_pos((P.C[1 - p] - P.B[p]) / (P.C[p] - P.B[p]));
    for (int q = 0; q < 2; ++q) pc[q] = 0.5 * arg_pos((P.B[q] - P.C[q]) / (P.B[1 - q] - P.C[q]));
}

// Intersection of the bisectors at B0 and C0.
cplx incenter(const QuadPts& P, const std::array<double, 2>& pb, const std::array<double, 2>& pc) {
    cplx d1 = (P.C[0] - P.B[0]) / std::abs(P.C[0] - P.B[0]) * std::polar(1.0, pb[0]);
    cplx d2 = (P.B[1] - P.C[0]) / std::abs(P.B[1] - P.C[0]) * std::polar(1.0, pc[0]);
    // B0 + t d1 = C0 + s d2
    Eigen::Matrix2d A;
    A << d1.real(), -d2.real(), d1.imag(), -d2.imag();
    cplx rhs = P.C[0] - P.B[0];
    Eigen::Vector2d ts = A.colPivHouseholderQr().solve(Eigen::Vector2d(rhs.real(), rhs.imag()));
    return P.B[0] + ts(0) * d1;
}

double signed_area(const QuadPts& P) {
    cplx pts[4] = {P.B[0], P.C[0], P.B[1], P.C[1]};
    double a = 0;
    for (int i = 0; i < 4; ++i) a += std::imag(std::conj(pts[i]) * pts[(i + 1) % 4]);
    return 0.5 * a;
}

BgPolygon to_polygon(const QuadPts& P) {
    BgPolygon poly;
    for (cplx w : {P.B[0], P.C[0], P.B[1], P.C[1], P.B[0]}) bg::append(poly.outer(), BgPoint(w.real(), w.imag()));
    return poly;
}

// (p, q) with q.corner[p][q] == c.
std::pair<int, int> corner_slot(const Quad& q, int c) {
    for (int p = 0; p < 2; ++p)
        for (int s = 0; s < 2; ++s)
            if (q.corner[p][s] == c) return {p, s};
    throw InputError("corner " + std::to_string(c) + " is not in quad " + std::to_string(q.z));
}

std::shared_ptr<const DoubleCover> plain_chi(const DualPair& dp) {
    return std::make_shared<const DoubleCover>(DoubleCover::chi(dp));
}

} // namespace

SEmbedding build_sembedding(const DualPair& dp, const IsingWeights& w, const CornerSpinor& F1, const CornerSpinor& F2,
                            int base_lambda, double tol) {
    if (F1.cover.get() != F2.cover.get() && F1.cover->cut_edges() != F2.cover->cut_edges())
        throw InputError("F1 and F2 live on different covers");
    ComplexCornerSpinor F = make_spinor<cplx>(F1.cover);
    F.defined = F1.defined;
    for (int c = 0; c < dp.num_corners(); ++c) F.values[c] = cplx(F1.values[c], F2.values[c]);
    return build_sembedding(dp, w, F, base_lambda, tol);
}

SEmbedding build_sembedding(const DualPair& dp, const IsingWeights& w, const ComplexCornerSpinor& F, int base_lambda,
                            double tol) {
    const int C = dp.num_corners();
    double fmax = 0, g11 = 0, g22 = 0, g12 = 0;
    for (int c = 0; c < C; ++c) {
        if (!F.is_defined(c)) throw InputError("spinor undefined at corner " + std::to_string(c));
        fmax = std::max(fmax, std::abs(F.values[c]));
        g11 += std::norm(F.values[c].real());
        g22 += std::norm(F.values[c].imag());
        g12 += F.values[c].real() * F.values[c].imag();
    }
    if (g11 * g22 == 0 || g11 * g22 - g12 * g12 < 1e-12 * g11 * g22)
        throw DegenerateSpinorError("Re F and Im F are linearly dependent");
    PropagationReport pr = check_propagation(F, w);
    if (pr.max_residual > tol * std::max(1.0, fmax))
        throw NonIntegrableError("spinor violates propagation at quad " + std::to_string(pr.worst_quad) + " (residual " +
                                 std::to_string(pr.max_residual) + ")");
    ComplexHFunction H = integrate_HF(F, base_lambda, cplx(0), tol);
    for (int l = 0; l < dp.num_lambda(); ++l)
        if (!H.defined[l]) throw InputError("Λ vertex " + std::to_string(l) + " is not reached by the spinor");
    SEmbedding S;
    S.dp = &dp;
    S.S = H.values;
    S.weights = w;
    S.F = F;
    S.has_spinor = true;
    S.Sz.assign(dp.num_quads(), cplx(kNaN, kNaN));
    for (int z = 0; z < dp.num_quads(); ++z) {
        const Quad& q = dp.quad(z);
        double th = w.quad_theta(dp, z);
        std::array<cplx, 4> est;
        for (int p = 0; p < 2; ++p)
            est[p] = S.bullet(z, p) - std::cos(th) * F.values[q.corner[p][0]] * F.lift(q.corner[p][0], q.corner[p][1]);
        for (int s = 0; s < 2; ++s)
            est[2 + s] = S.circ(z, s) + std::sin(th) * F.values[q.corner[0][s]] * F.lift(q.corner[0][s], q.corner[1][s]);
        cplx mean = (est[0] + est[1] + est[2] + est[3]) / 4.0;
        for (cplx e : est) S.center_mismatch = std::max(S.center_mismatch, std::abs(e - mean));
        S.Sz[z] = mean;
    }
    return S;
}

SEmbedding sembedding_from_positions(const DualPair& dp, std::vector<cplx> pos) {
    if (int(pos.size()) != dp.num_lambda()) throw InputError("positions must be given on Λ");
    SEmbedding S;
    S.dp = &dp;
    S.S = std::move(pos);
    S.Sz.assign(dp.num_quads(), cplx(kNaN, kNaN));
    for (int z = 0; z < dp.num_quads(); ++z) S.Sz[z] = quad_geometry(S, z).center;
    return S;
}

std::array<CornerSpinor, 2> dirac_pair(std::shared_ptr<const DoubleCover> cover, double delta) {
    const DiracPhase* dir = cover->dirac();
    if (!dir) throw InputError("Dirac pair needs a chi cover");
    if (!(delta > 0)) throw InputError("delta must be positive");
    CornerSpinor F1 = make_spinor<double>(cover), F2 = make_spinor<double>(cover);
    const cplx k = dir->varsigma() * std::sqrt(delta);
    for (int c = 0; c < cover->pair().num_corners(); ++c) {
        cplx f = k * std::conj(dir->eta(c));
        F1.values[c] = f.real();
        F2.values[c] = f.imag();
    }
    return {F1, F2};
}

CornerSpinor project_sholo(const CornerSpinor& F, const IsingWeights& w) {
    Eigen::MatrixXd V = sholo_basis(*F.cover, w);
    Eigen::Map<const Eigen::VectorXd> f(F.values.data(), F.values.size());
    Eigen::VectorXd g = V * (V.transpose() * f);
    CornerSpinor out = make_spinor<double>(F.cover);
    for (int c = 0; c < g.size(); ++c) out.values[c] = g(c);
    return out;
}

PerturbedInstance perturbed_instance(const DualPair& dp, const IsingWeights& w, double eps, std::mt19937_64& rng) {
    IsoradialGeometry geo = isoradial_geometry(dp);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    PerturbedInstance out;
    out.weights = w;
    for (int z = 0; z < dp.num_quads(); ++z) {
        int e = dp.quad(z).edge;
        double th = std::clamp(w.theta(e) + eps * u(rng), 0.02, M_PI / 2 - 0.02);
        out.weights.x[e] = x_from_theta(th);
    }
    out.cover = plain_chi(dp);
    auto pair = dirac_pair(out.cover, geo.delta);
    out.F1 = project_sholo(pair[0], out.weights);
    out.F2 = project_sholo(pair[1], out.weights);
    return out;
}

QuadGeometry quad_geometry(const std::array<cplx, 4>& pts, cplx center) {
    QuadPts P{{pts[0], pts[2]}, {pts[1], pts[3]}};
    const double scale = quad_scale(P);
    for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q)
            if (!(std::abs(P.B[p] - P.C[q]) > 1e-14 * std::max(scale, 1e-300)) || !std::isfinite(scale))
                throw GeometryError("degenerate side");
    QuadGeometry g;
    half_angles(P, g.phi_bullet, g.phi_circ);
    for (double a : {g.phi_bullet[0], g.phi_bullet[1], g.phi_circ[0], g.phi_circ[1]})
        if (!(a > 1e-12 && a < M_PI - 1e-12)) throw GeometryError("flat angle");
    g.angle_sum_residual = std::abs(g.phi_bullet[0] + g.phi_bullet[1] + g.phi_circ[0] + g.phi_circ[1] - M_PI);
    g.center = std::isfinite(center.real()) ? center : incenter(P, g.phi_bullet, g.phi_circ);
    double r = 0;
    for (int p = 0; p < 2; ++p) r += std::abs(P.B[p] - g.center) * std::sin(g.phi_bullet[p]);
    for (int q = 0; q < 2; ++q) r += std::abs(P.C[q] - g.center) * std::sin(g.phi_circ[q]);
    g.r = r / 4;
    for (int p = 0; p < 2; ++p)
        g.distance_residual = std::max(g.distance_residual, std::abs(std::abs(P.B[p] - g.center) - g.r / std::sin(g.phi_bullet[p])));
    for (int q = 0; q < 2; ++q)
        g.distance_residual = std::max(g.distance_residual, std::abs(std::abs(P.C[q] - g.center) - g.r / std::sin(g.phi_circ[q])));
    return g;
}

QuadGeometry quad_geometry(const SEmbedding& S, int z) {
    cplx center = S.Sz.size() == size_t(S.dp->num_quads()) ? S.Sz[z] : cplx(kNaN, kNaN);
    try {
        return quad_geometry({S.bullet(z, 0), S.circ(z, 0), S.bullet(z, 1), S.circ(z, 1)}, center);
    } catch (const GeometryError& e) {
        throw GeometryError("quad " + std::to_string(z) + ": " + e.what());
    }
}

QuadCoefficients quad_coefficients(const QuadGeometry& g, double theta) {
    QuadCoefficients k;
    k.a_bullet = std::sin(theta) * std::sin(theta) / g.r;
    k.a_circ = std::cos(theta) * std::cos(theta) / g.r;
    for (int p = 0; p < 2; ++p)
        for (int s = 0; s < 2; ++s) {
            double cb = 1.0 / std::tan(g.phi_bullet[p]), cc = 1.0 / std::tan(g.phi_circ[s]);
            k.b[p][s] = k.a_circ - cb / (g.r * (cb + cc));
        }
    return k;
}

DbarRow dbar_row(const std::array<cplx, 4>& pts, cplx center) {
    const double sgn[4] = {1, -1, 1, -1};
    DbarRow row;
    cplx norm = 0;
    for (int j = 0; j < 4; ++j) {
        row.coef[j] = sgn[j] / (pts[j] - center);
        norm += row.coef[j] * std::conj(pts[j]);
    }
    row.mu = 4.0 / norm;
    for (int j = 0; j < 4; ++j) row.coef[j] *= row.mu / 4.0;
    return row;
}

ProperReport properness_check(const SEmbedding& S, double tol) {
    const DualPair& dp = *S.dp;
    const int Q = dp.num_quads();
    ProperReport rep;
    rep.quads = Q;
    rep.min_area = std::numeric_limits<double>::infinity();
    double gscale = 0;
    for (cplx s : S.S) gscale = std::max(gscale, std::abs(s));
    std::vector<BgPolygon> polys(Q);
    std::vector<bg::model::box<BgPoint>> boxes(Q);
    std::vector<double> areas(Q);
    auto bad = [&](int z, std::string why) {
        rep.proper = false;
        rep.violations.push_back("quad " + std::to_string(z) + ": " + why);
        if (rep.bad_quads.empty() || rep.bad_quads.back() != z) rep.bad_quads.push_back(z);
    };
    for (int z = 0; z < Q; ++z) {
        QuadPts P = quad_pts(S, z);
        double sc = quad_scale(P);
        areas[z] = signed_area(P);
        rep.min_area = std::min(rep.min_area, areas[z]);
        double tang = std::abs(std::abs(P.B[0] - P.C[0]) + std::abs(P.B[1] - P.C[1]) - std::abs(P.B[0] - P.C[1]) -
                               std::abs(P.B[1] - P.C[0]));
        rep.tangential_max = std::max(rep.tangential_max, tang);
        if (!(areas[z] > tol * sc * sc)) {
            bad(z, areas[z] < 0 ? "clockwise" : "degenerate");
            continue;
        }
        try {
            QuadGeometry g = quad_geometry(S, z);
            if (g.distance_residual > 1e-6 * sc) bad(z, "not tangential");
        } catch (const GeometryError& e) {
            bad(z, e.what());
            continue;
        }
        polys[z] = to_polygon(P);
        bg::envelope(polys[z], boxes[z]);
        if (std::isfinite(S.Sz[z].real()) && !bg::within(BgPoint(S.Sz[z].real(), S.Sz[z].imag()), polys[z]))
            bad(z, "center outside the quad");
    }
    for (int z = 0; z < Q; ++z) {
        if (polys[z].outer().empty()) continue;
        for (int y = z + 1; y < Q; ++y) {
            if (polys[y].outer().empty() || !bg::intersects(boxes[z], boxes[y])) continue;
            std::vector<BgPolygon> out;
            bg::intersection(polys[z], polys[y], out);
            double a = 0;
            for (const auto& p : out) a += bg::area(p);
            if (a > 1e-9 * std::min(areas[z], areas[y])) bad(z, "overlaps quad " + std::to_string(y));
        }
    }
    (void)gscale;
    return rep;
}

RecoveredWeights recover_weights(const SEmbedding& S) {
    const DualPair& dp = *S.dp;
    const int Q = dp.num_quads(), C = dp.num_corners();
    RecoveredWeights out;
    out.weights = IsingWeights::uniform(dp.map(), 1.0);
    out.theta.resize(Q);
    out.theta_alt.resize(Q);
    std::vector<cplx> center(Q);
    for (int z = 0; z < Q; ++z) {
        QuadGeometry g = quad_geometry(S, z);
        center[z] = g.center;
        auto cot = [](double a) { return 1.0 / std::tan(a); };
        double num = cot(g.phi_circ[0]) + cot(g.phi_circ[1]), den = cot(g.phi_bullet[0]) + cot(g.phi_bullet[1]);
        if (!(num > 0 && den > 0)) throw GeometryError("quad " + std::to_string(z) + " has no admissible weight");
        double t1 = std::sqrt(num / den);
        double t2 = std::sqrt(std::sin(g.phi_bullet[0]) * std::sin(g.phi_bullet[1]) /
                              (std::sin(g.phi_circ[0]) * std::sin(g.phi_circ[1])));
        out.form_mismatch = std::max(out.form_mismatch, std::abs(t1 - t2));
        out.theta[z] = std::atan(t1);
        out.theta_alt[z] = std::atan(t2);
        out.weights.x[dp.quad(z).edge] = x_from_theta(out.theta[z]);
    }
    auto cover = plain_chi(dp);
    ComplexCornerSpinor F = make_spinor<cplx>(cover);
    F.defined.assign(C, 0);
    auto dS = [&](int c) { return S.S[dp.lambda_bullet(dp.corner(c).vb)] - S.S[dp.lambda_circ(dp.corner(c).vc)]; };
    double scale = 0;
    for (int c = 0; c < C; ++c) scale = std::max(scale, std::abs(dS(c)));
    // value at b continued onto the sheet of a, from the product relation in their quad
    auto partner = [&](int a, int b, int z) {
        const Quad& q = dp.quad(z);
        auto [pa, sa] = corner_slot(q, a);
        auto [pb, sb] = corner_slot(q, b);
        double th = out.theta[z];
        if (pa == pb) return (S.S[dp.lambda_bullet(q.vb[pa])] - center[z]) / (std::cos(th) * F.values[a]);
        if (sa == sb) return (center[z] - S.S[dp.lambda_circ(q.vc[sa])]) / (std::sin(th) * F.values[a]);
        throw InputError("corners " + std::to_string(a) + ", " + std::to_string(b) + " are opposite");
    };
    for (int s = 0; s < C; ++s) {
        if (F.defined[s]) continue;
        F.values[s] = std::sqrt(dS(s));
        F.defined[s] = 1;
        std::queue<int> qu;
        qu.push(s);
        while (!qu.empty()) {
            int a = qu.front();
            qu.pop();
            for (int k : dp.corner_edges(a)) {
                const UpsEdge& ue = dp.ups_edges()[k];
                if (ue.kind != UpsKind::Quad) continue;
                int b = ue.a == a ? ue.b : ue.a;
                cplx cont = partner(a, b, ue.quad);
                if (!F.defined[b]) {
                    F.values[b] = double(cover->transport(a, b)) * cont;
                    F.defined[b] = 1;
                    qu.push(b);
                } else if (std::abs(F.lift(a, b) - cont) > 1e-8 * std::sqrt(std::max(scale, 1e-300))) {
                    throw SheetError("square roots of S(v•) - S(v°) are inconsistent at corners " + std::to_string(a) +
                                     ", " + std::to_string(b));
                }
            }
        }
    }
    for (int c = 0; c < C; ++c) out.square_residual = std::max(out.square_residual, std::abs(F.values[c] * F.values[c] - dS(c)));
    out.F = F;
    out.propagation_residual = check_propagation(F, out.weights).max_residual;
    return out;
}

SLaplacian s_laplacian(const SEmbedding& S) {
    const DualPair& dp = *S.dp;
    const int L = dp.num_lambda(), Q = dp.num_quads(), C = dp.num_corners();
    SLaplacian out;
    out.M = Eigen::MatrixXd::Zero(L, L);
    out.a_bullet.assign(Q, 0);
    out.a_circ.assign(Q, 0);
    out.b.assign(C, 0);
    out.b_complete.assign(C, 0);
    for (int c = 0; c < C; ++c) out.b_complete[c] = dp.corner(c).quads[0] >= 0 && dp.corner(c).quads[1] >= 0;
    for (int z = 0; z < Q; ++z) {
        const Quad& q = dp.quad(z);
        QuadCoefficients k = quad_coefficients(quad_geometry(S, z), S.weights.quad_theta(dp, z));
        const double ab = k.a_bullet, ac = k.a_circ;
        out.a_bullet[z] = ab;
        out.a_circ[z] = ac;
        int b0 = dp.lambda_bullet(q.vb[0]), b1 = dp.lambda_bullet(q.vb[1]);
        int c0 = dp.lambda_circ(q.vc[0]), c1 = dp.lambda_circ(q.vc[1]);
        out.M(b0, b1) += ab;
        out.M(b1, b0) += ab;
        out.M(b0, b0) -= ab;
        out.M(b1, b1) -= ab;
        out.M(c0, c1) -= ac;
        out.M(c1, c0) -= ac;
        out.M(c0, c0) += ac;
        out.M(c1, c1) += ac;
        for (int p = 0; p < 2; ++p)
            for (int s = 0; s < 2; ++s) {
                double bz = k.b[p][s];
                out.b[q.corner[p][s]] += bz;
                int vb = dp.lambda_bullet(q.vb[p]), vc = dp.lambda_circ(q.vc[s]);
                out.M(vb, vc) += bz;
                out.M(vc, vb) += bz;
                out.M(vb, vb) -= bz;
                out.M(vc, vc) -= bz;
            }
    }
    return out;
}

LocalForm local_form(const SEmbedding& S, int l) {
    if (!S.has_spinor) throw InputError("local forms need the spinor of the s-embedding");
    const DualPair& dp = *S.dp;
    Star st = star_of(dp, l);
    const int n = static_cast<int>(st.quads.size());
    LocalForm out;
    out.quads = st.quads;
    std::vector<double> rho(n), phi(n), th(n);
    for (int s = 0; s < n; ++s) rho[s] = std::abs(S.F.values[st.corners[s]]);
    for (int s = 0; s < n; ++s) {
        int z = st.quads[s];
        const Quad& q = dp.quad(z);
        QuadGeometry g = quad_geometry(S, z);
        th[s] = S.weights.quad_theta(dp, z);
        if (st.bullet)
            phi[s] = g.phi_bullet[q.vb[0] == l ? 0 : 1];
        else
            phi[s] = g.phi_circ[q.vc[0] == l - dp.num_bullet() ? 0 : 1];
    }
    out.a_same.resize(n);
    out.a_other.resize(n);
    out.b.resize(n);
    auto rr = [&](int s) { return rho[s] * rho[(s + 1) % n] * std::sin(phi[s]); };
    std::vector<double> circ_part(n);
    for (int s = 0; s < n; ++s) {
        double sn = std::sin(th[s]), cs = std::cos(th[s]);
        if (st.bullet) {
            out.a_same[s] = sn * sn / cs / rr(s);
            out.a_other[s] = cs / rr(s);
            circ_part[s] = cs / rr(s);
        } else {
            out.a_same[s] = cs * cs / sn / rr(s);
            out.a_other[s] = sn / rr(s);
            circ_part[s] = cs * cs / sn / rr(s);
        }
    }
    // corner s lies between quads s-1 and s
    for (int s = 0; s < n; ++s) {
        int sp = (s + n - 1) % n;
        out.b[s] = circ_part[sp] + circ_part[s];
        if (st.bullet) out.b[s] -= std::sin(phi[sp] + phi[s]) / (rho[s] * rho[s] * std::sin(phi[sp]) * std::sin(phi[s]));
    }
    if (!st.bullet) {
        // around a G° vertex the geometric term carries the opposite-lattice half-angles
        for (int s = 0; s < n; ++s) {
            int sp = (s + n - 1) % n;
            double acc = 0;
            for (int t : {sp, s}) {
                int z = st.quads[t];
                const Quad& q = dp.quad(z);
                QuadGeometry g = quad_geometry(S, z);
                auto [pp, ss] = corner_slot(q, st.corners[s]);
                double cb = 1.0 / std::tan(g.phi_bullet[pp]), cc = 1.0 / std::tan(g.phi_circ[ss]);
                acc += cb / (g.r * (cb + cc));
            }
            out.b[s] -= acc;
        }
    }
    return out;
}

Eigen::MatrixXd subharmonic_form(const SEmbedding& S, const SLaplacian& L, int l) {
    const DualPair& dp = *S.dp;
    Star st = star_of(dp, l);
    const int n = static_cast<int>(st.corners.size());
    auto cover = plain_chi(dp);
    auto value = [&](const Eigen::VectorXd& x) {
        CornerSpinor F = make_spinor<double>(cover);
        F.defined.assign(dp.num_corners(), 0);
        for (int s = 0; s < n; ++s) {
            F.values[st.corners[s]] = x(s);
            F.defined[st.corners[s]] = 1;
        }
        for (int z : st.quads) complete_quad(F, S.weights, z, 1e-8);
        HFunction H = integrate_HF(F, l, 0.0, 1e-9);
        double v = 0;
        for (int k = 0; k < dp.num_lambda(); ++k)
            if (H.defined[k]) v += L.M(l, k) * H.values[k];
        return v;
    };
    Eigen::MatrixXd Qm(n, n);
    std::vector<double> diag(n);
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd e = Eigen::VectorXd::Unit(n, i);
        diag[i] = value(e);
        Qm(i, i) = diag[i];
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            Eigen::VectorXd e = Eigen::VectorXd::Unit(n, i) + Eigen::VectorXd::Unit(n, j);
            Qm(i, j) = Qm(j, i) = 0.5 * (value(e) - diag[i] - diag[j]);
        }
    return Qm;
}

SubharmonicResult subharmonicity_check(const SEmbedding& S, const SLaplacian& L, const CornerSpinor& F, int l,
                                       double tol, double rank_tol) {
    const DualPair& dp = *S.dp;
    Star st = star_of(dp, l);
    double scale = 0;
    for (int c : st.corners) {
        if (!F.is_defined(c)) throw InputError("spinor undefined at corner " + std::to_string(c));
        scale = std::max(scale, std::abs(F.values[c]));
    }
    for (int z : st.quads) {
        if (!quad_defined(F, dp.quad(z))) throw InputError("spinor undefined at quad " + std::to_string(z));
        if (quad_residual(F, S.weights, z) > 1e-8 * std::max(1.0, scale))
            throw InputError("spinor violates propagation at quad " + std::to_string(z));
    }
    CornerSpinor loc = F;
    loc.defined.assign(dp.num_corners(), 0);
    for (int z : st.quads)
        for (int p = 0; p < 2; ++p)
            for (int s = 0; s < 2; ++s) loc.defined[dp.quad(z).corner[p][s]] = 1;
    HFunction H = integrate_HF(loc, l, 0.0, 1e-9);
    SubharmonicResult out;
    for (int k = 0; k < dp.num_lambda(); ++k)
        if (H.defined[k]) out.value += L.M(l, k) * H.values[k];
    if (S.has_spinor) {
        const int n = static_cast<int>(st.corners.size());
        Eigen::MatrixXd B(n, 2);
        Eigen::VectorXd x(n);
        for (int s = 0; s < n; ++s) {
            int c = st.corners[s];
            B(s, 0) = S.F.values[c].real();
            B(s, 1) = S.F.values[c].imag();
            x(s) = F.values[c];
        }
        Eigen::VectorXd coef = B.colPivHouseholderQr().solve(x);
        out.span_residual = x.norm() > 0 ? (B * coef - x).norm() / x.norm() : 0;
        out.equality = out.span_residual < rank_tol;
    }
    double lscale = L.M.row(l).cwiseAbs().maxCoeff() * scale * scale;
    if (!S.has_spinor) out.equality = std::abs(out.value) <= tol * std::max(lscale, 1e-300);
    return out;
}

DbarS dbar_S(const SEmbedding& S) {
    const DualPair& dp = *S.dp;
    const int Q = dp.num_quads();
    DbarS out;
    out.D = Eigen::MatrixXcd::Zero(Q, dp.num_lambda());
    out.mu.resize(Q);
    out.r.resize(Q);
    for (int z = 0; z < Q; ++z) {
        const Quad& q = dp.quad(z);
        QuadGeometry g = quad_geometry(S, z);
        out.r(z) = g.r;
        int idx[4] = {dp.lambda_bullet(q.vb[0]), dp.lambda_circ(q.vc[0]), dp.lambda_bullet(q.vb[1]), dp.lambda_circ(q.vc[1])};
        DbarRow row = dbar_row({S.S[idx[0]], S.S[idx[1]], S.S[idx[2]], S.S[idx[3]]}, g.center);
        out.mu(z) = row.mu;
        for (int j = 0; j < 4; ++j) out.D(z, idx[j]) += row.coef[j];
    }
    return out;
}

std::vector<double> L_S(const SEmbedding& S, int base_lambda, double tol) {
    const DualPair& dp = *S.dp;
    CornerSpinor F = make_spinor<double>(plain_chi(dp));
    for (int c = 0; c < dp.num_corners(); ++c)
        F.values[c] = std::sqrt(std::abs(S.S[dp.lambda_bullet(dp.corner(c).vb)] - S.S[dp.lambda_circ(dp.corner(c).vc)]));
    HFunction H = integrate_HF(F, base_lambda, 0.0, tol);
    return H.values;
}

DbarChecks dbar_checks(const SEmbedding& S) {
    DbarS D = dbar_S(S);
    const int L = S.dp->num_lambda();
    Eigen::VectorXcd one = Eigen::VectorXcd::Ones(L), s(L), sb(L), l(L);
    std::vector<double> ls = L_S(S);
    for (int k = 0; k < L; ++k) {
        s(k) = S.S[k];
        sb(k) = std::conj(S.S[k]);
        l(k) = ls[k];
    }
    DbarChecks out;
    out.one = (D.D * one).cwiseAbs().maxCoeff();
    out.S = (D.D * s).cwiseAbs().maxCoeff();
    out.Sbar = (D.D * sb - one.head(D.D.rows())).cwiseAbs().maxCoeff();
    out.L = (D.D * l).cwiseAbs().maxCoeff();
    return out;
}

std::vector<int> interior_lambda(const DualPair& dp) {
    std::vector<int> out;
    for (int l = 0; l < dp.num_lambda(); ++l)
        if (lambda_is_interior(dp, l)) out.push_back(l);
    return out;
}

FactorizationS factorization_S_check(const SEmbedding& S, const SLaplacian& L) {
    DbarS D = dbar_S(S);
    Eigen::VectorXcd w1 = (D.r.cast<cplx>().array() / D.mu.array()).matrix();
    Eigen::VectorXcd w2 = (D.r.cast<cplx>().array() / D.mu.conjugate().array()).matrix();
    Eigen::MatrixXcd A1 = 16.0 * D.D.transpose() * w1.asDiagonal() * D.D;
    Eigen::MatrixXcd A2 = 16.0 * D.D.adjoint() * w2.asDiagonal() * D.D.conjugate();
    FactorizationS out;
    out.scale = L.M.cwiseAbs().maxCoeff();
    for (int l : interior_lambda(*S.dp)) {
        ++out.interior_rows;
        Eigen::RowVectorXcd m = L.M.row(l).cast<cplx>();
        out.residual = std::max(out.residual, (m + A1.row(l)).cwiseAbs().sum());
        out.residual_bar = std::max(out.residual_bar, (m + A2.row(l)).cwiseAbs().sum());
        out.residual_plus = std::max({out.residual_plus, (m - A1.row(l)).cwiseAbs().sum(), (m - A2.row(l)).cwiseAbs().sum()});
    }
    return out;
}

HarmonicConjugate harmonic_conjugate(const SEmbedding& S, const std::vector<double>& H1, double tol) {
    const int L = S.dp->num_lambda();
    if (int(H1.size()) != L) throw InputError("H1 must be given on Λ");
    DbarS D = dbar_S(S);
    const int Q = static_cast<int>(D.D.rows());
    Eigen::MatrixXd A(2 * Q, L);
    A.topRows(Q) = -D.D.imag();
    A.bottomRows(Q) = D.D.real();
    Eigen::VectorXcd h = Eigen::Map<const Eigen::VectorXd>(H1.data(), L).cast<cplx>();
    Eigen::VectorXcd dh = D.D * h;
    Eigen::VectorXd rhs(2 * Q);
    rhs.head(Q) = -dh.real();
    rhs.tail(Q) = -dh.imag();
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
    cod.setThreshold(1e-10);
    Eigen::VectorXd x = cod.solve(rhs);
    x.array() -= x.mean();
    HarmonicConjugate out;
    out.kernel_dim = L - static_cast<int>(cod.rank());
    out.H2.assign(x.data(), x.data() + L);
    out.residual = (dh + cplx(0, 1) * (D.D * x.cast<cplx>())).cwiseAbs().maxCoeff();
    double scale = std::max(1.0, dh.cwiseAbs().maxCoeff());
    if (out.residual > tol * scale)
        throw InputError("no harmonic conjugate: residual " + std::to_string(out.residual));
    return out;
}

} // namespace isingkit
