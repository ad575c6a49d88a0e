#include "isingkit/periodic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/tools/minima.hpp>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "isingkit/errors.hpp"
#include "isingkit/sembed.hpp"
#include "isingkit/weights.hpp"

namespace isingkit {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Shift operator+(Shift a, Shift b) { return {a[0] + b[0], a[1] + b[1]}; }
Shift operator-(Shift a) { return {-a[0], -a[1]}; }

cplx lift(const std::array<cplx, 2>& P, const Shift& s) { return double(s[0]) * P[0] + double(s[1]) * P[1]; }

} // namespace

PeriodicMap PeriodicMap::square(int w, int h) {
    if (w < 1 || h < 1) throw InputError("fundamental domain must be at least 1 x 1");
    PeriodicMap m;
    m.period = {cplx(w, 0), cplx(0, h)};
    for (int j = 0; j < h; ++j)
        for (int i = 0; i < w; ++i) m.pos.emplace_back(i, j);
    auto id = [&](int i, int j) { return j * w + i; };
    for (int j = 0; j < h; ++j)
        for (int i = 0; i < w; ++i) {
            m.edges.push_back({id(i, j), id((i + 1) % w, j), {i + 1 == w ? 1 : 0, 0}});
            m.edges.push_back({id(i, j), id(i, (j + 1) % h), {0, j + 1 == h ? 1 : 0}});
        }
    return m;
}

PeriodicMap PeriodicMap::triangular(int w, int h) {
    if (w < 1 || h < 1) throw InputError("fundamental domain must be at least 1 x 1");
    const cplx a(1, 0), b = std::polar(1.0, M_PI / 3);
    PeriodicMap m;
    m.period = {double(w) * a, double(h) * b};
    for (int j = 0; j < h; ++j)
        for (int i = 0; i < w; ++i) m.pos.push_back(double(i) * a + double(j) * b);
    auto id = [&](int i, int j) { return j * w + i; };
    for (int j = 0; j < h; ++j)
        for (int i = 0; i < w; ++i) {
            int i1 = (i + 1) % w, j1 = (j + 1) % h;
            int si = i + 1 == w ? 1 : 0, sj = j + 1 == h ? 1 : 0;
            m.edges.push_back({id(i, j), id(i1, j), {si, 0}});
            m.edges.push_back({id(i, j), id(i, j1), {0, sj}});
            // (i+1, j) -> (i, j+1)
            m.edges.push_back({id(i1, j), id(i, j1), {-si, sj}});
        }
    return m;
}

TorusPair::TorusPair(PeriodicMap m) : map_(std::move(m)) {
    const int V = map_.num_vertices(), E = map_.num_edges(), H = 2 * E;
    if (V == 0 || E == 0) throw InputError("empty fundamental domain");
    std::vector<int> tail(H), head(H);
    std::vector<Shift> shift(H);
    std::vector<cplx> vec(H);
    for (int e = 0; e < E; ++e) {
        const auto& ed = map_.edges[e];
        if (ed.u < 0 || ed.u >= V || ed.v < 0 || ed.v >= V) throw InputError("edge " + std::to_string(e) + " has a bad endpoint");
        tail[2 * e] = ed.u, head[2 * e] = ed.v, shift[2 * e] = ed.shift;
        tail[2 * e + 1] = ed.v, head[2 * e + 1] = ed.u, shift[2 * e + 1] = -ed.shift;
    }
    for (int h = 0; h < H; ++h) {
        vec[h] = map_.pos[head[h]] + map_.translate(shift[h]) - map_.pos[tail[h]];
        if (std::abs(vec[h]) < 1e-12) throw GeometryError("half-edge " + std::to_string(h) + " has zero length");
    }
    std::vector<std::vector<int>> out(V);
    for (int h = 0; h < H; ++h) out[tail[h]].push_back(h);
    std::vector<int> rnext(H), rprev(H);
    for (int v = 0; v < V; ++v) {
        auto& o = out[v];
        if (o.empty()) throw InputError("isolated vertex " + std::to_string(v));
        std::sort(o.begin(), o.end(), [&](int a, int b) { return std::arg(vec[a]) < std::arg(vec[b]); });
        for (size_t i = 0; i < o.size(); ++i) {
            if (o.size() > 1 && std::abs(std::arg(vec[o[i]] / vec[o[(i + 1) % o.size()]])) < 1e-12)
                throw GeometryError("overlapping edges at vertex " + std::to_string(v));
            rnext[o[i]] = o[(i + 1) % o.size()];
            rprev[o[(i + 1) % o.size()]] = o[i];
        }
    }
    std::vector<int> face(H, -1);
    std::vector<Shift> sigma(H);
    for (int h0 = 0; h0 < H; ++h0) {
        if (face[h0] >= 0) continue;
        const int f = num_faces();
        Shift s{0, 0};
        cplx sum = 0;
        int n = 0, g = h0;
        do {
            face[g] = f;
            sigma[g] = s;
            sum += map_.pos[tail[g]] + map_.translate(s);
            ++n;
            s = s + shift[g];
            g = rprev[g ^ 1];
        } while (g != h0);
        if (s[0] != 0 || s[1] != 0) throw GeometryError("face " + std::to_string(f) + " wraps around the torus");
        face_pos_.push_back(sum / double(n));
    }
    if (V - E + num_faces() != 0) throw GeometryError("fundamental domain is not a torus map (Euler characteristic != 0)");
    corners_.resize(H);
    for (int h = 0; h < H; ++h) {
        TCorner& c = corners_[h];
        c.vertex = tail[h];
        c.face = face[h];
        c.face_shift = -sigma[h];
        c.vec = map_.pos[tail[h]] - (face_pos_[face[h]] + map_.translate(c.face_shift));
    }
    quads_.resize(E);
    for (int e = 0; e < E; ++e) {
        const int h = 2 * e, t = 2 * e + 1;
        TQuad& q = quads_[e];
        q.edge = e;
        q.vb = {tail[h], head[h]};
        q.sb = {Shift{0, 0}, shift[h]};
        q.vc = {face[t], face[h]};
        q.sc = {shift[h] + corners_[t].face_shift, corners_[h].face_shift};
        q.corner[0][0] = rprev[h];
        q.corner[0][1] = h;
        q.corner[1][0] = t;
        q.corner[1][1] = rprev[t];
    }
}

int TorusPair::transport(int z, int a, int b) const {
    (void)z;
    cplx va = corners_[a].vec, vb = corners_[b].vec;
    double d = std::arg(vb / va);
    cplx ea = std::polar(1.0, -0.5 * std::arg(va)), eb = std::polar(1.0, -0.5 * std::arg(vb));
    cplx cont = ea * std::polar(1.0, -0.5 * d);
    return std::real(eb * std::conj(cont)) >= 0 ? 1 : -1;
}

cplx TorusPair::dirac_value(int c) const { return std::sqrt(corners_[c].vec); }

Eigen::MatrixXd periodic_propagation_matrix(const TorusPair& tp, const std::vector<double>& x) {
    const int Q = tp.num_quads(), C = tp.num_corners();
    if (int(x.size()) != Q) throw InputError("need one weight per edge of the fundamental domain");
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(4 * Q, C);
    for (int z = 0; z < Q; ++z) {
        if (!(x[z] > 0 && x[z] < 1)) throw InputError("weights must lie in (0, 1)");
        const auto& q = tp.quad(z);
        double th = theta_from_x(x[z]);
        int row = 4 * z;
        for (int p = 0; p < 2; ++p)
            for (int s = 0; s < 2; ++s, ++row) {
                int c = q.corner[p][s], b = q.corner[p][1 - s], d = q.corner[1 - p][s];
                M(row, c) += 1;
                M(row, b) -= tp.transport(z, c, b) * std::cos(th);
                M(row, d) -= tp.transport(z, c, d) * std::sin(th);
            }
    }
    return M;
}

PeriodicKernel periodic_kernel(const TorusPair& tp, const std::vector<double>& x, double rel_tol) {
    Eigen::MatrixXd M = periodic_propagation_matrix(tp, x);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
    Eigen::VectorXd sv = svd.singularValues();
    const int C = tp.num_corners();
    PeriodicKernel k;
    k.threshold = rel_tol * sv(0);
    for (int i = C - 1; i >= 0; --i) k.singular_values.push_back(sv(i));
    for (int i = 0; i < C; ++i)
        if (sv(i) < k.threshold) ++k.dimension;
    if (k.dimension == 0)
        k.gap = sv(C - 1) / k.threshold;
    else if (k.dimension < C)
        k.gap = sv(C - k.dimension - 1) / std::max(sv(C - k.dimension), 1e-300);
    if (k.dimension != 2) return k;
    Eigen::MatrixXd V = svd.matrixV().rightCols(2);
    Eigen::VectorXd d1(C), d2(C);
    for (int c = 0; c < C; ++c) {
        cplx f = tp.dirac_value(c);
        d1(c) = f.real();
        d2(c) = f.imag();
    }
    Eigen::Vector2d a = V.transpose() * d1, b = V.transpose() * d2;
    Eigen::VectorXd f1 = V.col(0), f2 = V.col(1);
    double det = a(0) * b(1) - a(1) * b(0);
    if (std::abs(det) > 1e-6 * a.norm() * b.norm()) {
        f1 = V * a;
        f2 = V * b;
        k.dirac_aligned = true;
    }
    k.F1.assign(f1.data(), f1.data() + C);
    k.F2.assign(f2.data(), f2.data() + C);
    return k;
}

namespace {

// Solves u(vertex) - u(face) - shift . P = inc(c) over corners, u(0) = 0.
template <class T>
std::pair<std::vector<T>, std::array<T, 2>> solve_quasi_periodic(const TorusPair& tp, const std::vector<T>& inc,
                                                                 double* closure) {
    using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
    using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;
    const int C = tp.num_corners(), L = tp.num_lambda();
    Mat A = Mat::Zero(C + 1, L + 2);
    Vec rhs = Vec::Zero(C + 1);
    for (int c = 0; c < C; ++c) {
        const auto& cr = tp.corner(c);
        A(c, cr.vertex) += T(1);
        A(c, tp.lambda_face(cr.face)) -= T(1);
        A(c, L) -= T(double(cr.face_shift[0]));
        A(c, L + 1) -= T(double(cr.face_shift[1]));
        rhs(c) = inc[c];
    }
    A(C, 0) = T(1);
    Vec sol = A.completeOrthogonalDecomposition().solve(rhs);
    if (closure) *closure = (A * sol - rhs).cwiseAbs().maxCoeff();
    std::vector<T> u(sol.data(), sol.data() + L);
    return {u, {sol(L), sol(L + 1)}};
}

void require_pair(const PeriodicKernel& k) {
    if (k.dimension != 2 || k.F1.empty()) throw DegenerateSpinorError("kernel is not two-dimensional");
}

} // namespace

std::array<cplx, 4> PeriodicSEmbedding::quad_points(int z) const {
    const auto& q = tp->quad(z);
    return {S[q.vb[0]] + lift(periods, q.sb[0]), S[tp->lambda_face(q.vc[0])] + lift(periods, q.sc[0]),
            S[q.vb[1]] + lift(periods, q.sb[1]), S[tp->lambda_face(q.vc[1])] + lift(periods, q.sc[1])};
}

PeriodicSEmbedding build_periodic_sembedding(const TorusPair& tp, const std::vector<double>& x, const PeriodicKernel& k,
                                             cplx kappa) {
    require_pair(k);
    if (std::abs(kappa.imag()) <= 1e-12 * std::max(1.0, std::abs(kappa)))
        throw DegenerateSpinorError("real kappa gives a collinear image");
    const int C = tp.num_corners();
    PeriodicSEmbedding S;
    S.tp = &tp;
    S.x = x;
    S.kappa = kappa;
    S.F.resize(C);
    std::vector<cplx> inc(C);
    for (int c = 0; c < C; ++c) {
        S.F[c] = k.F1[c] + kappa * k.F2[c];
        inc[c] = S.F[c] * S.F[c];
    }
    auto [u, P] = solve_quasi_periodic<cplx>(tp, inc, &S.closure);
    S.S = std::move(u);
    S.periods = P;
    S.tau = std::abs(P[0]) > 0 ? P[1] / P[0] : cplx(kNaN, kNaN);
    S.Sz.resize(tp.num_quads());
    for (int z = 0; z < tp.num_quads(); ++z) {
        const auto& q = tp.quad(z);
        auto pts = S.quad_points(z);
        double th = theta_from_x(x[z]);
        cplx acc = 0;
        for (int p = 0; p < 2; ++p) {
            int a = q.corner[p][0], b = q.corner[p][1];
            acc += pts[2 * p] - std::cos(th) * S.F[a] * double(tp.transport(z, a, b)) * S.F[b];
        }
        for (int s = 0; s < 2; ++s) {
            int a = q.corner[0][s], b = q.corner[1][s];
            acc += pts[2 * s + 1] + std::sin(th) * S.F[a] * double(tp.transport(z, a, b)) * S.F[b];
        }
        S.Sz[z] = acc / 4.0;
    }
    return S;
}

LPeriod l_period(const TorusPair& tp, const PeriodicKernel& k, cplx kappa) {
    require_pair(k);
    const int C = tp.num_corners();
    std::vector<double> inc(C);
    double mean = 0;
    for (int c = 0; c < C; ++c) {
        inc[c] = std::norm(k.F1[c] + kappa * k.F2[c]);
        mean += inc[c] / C;
    }
    auto [u, P] = solve_quasi_periodic<double>(tp, inc, nullptr);
    LPeriod out;
    out.periods = P;
    out.defect = std::hypot(P[0], P[1]) / std::max(mean, 1e-300);
    return out;
}

namespace {

struct KappaObjective {
    const TorusPair* tp;
    const PeriodicKernel* k;
};

double kappa_objective(const gsl_vector* v, void* params) {
    auto* o = static_cast<KappaObjective*>(params);
    double t = gsl_vector_get(v, 0), phi = gsl_vector_get(v, 1);
    if (t < std::log(1e-2) || t > std::log(1e2) || phi <= 0 || phi >= M_PI) return 1e30;
    cplx kappa = std::polar(std::exp(t), phi);
    double d = l_period(*o->tp, *o->k, kappa).defect;
    return d * d;
}

} // namespace

KappaSearch find_kappa_L(const TorusPair& tp, const PeriodicKernel& k) {
    require_pair(k);
    KappaSearch out;
    out.defect = std::numeric_limits<double>::infinity();
    KappaObjective obj{&tp, &k};
    gsl_multimin_function fn{kappa_objective, 2, &obj};
    gsl_set_error_handler_off();
    const gsl_multimin_fminimizer_type* type = gsl_multimin_fminimizer_nmsimplex2;
    for (double t : {std::log(0.03), std::log(0.3), 0.0, std::log(3.0), std::log(30.0)})
        for (double phi : {M_PI / 6, M_PI / 2, 5 * M_PI / 6}) {
            ++out.starts;
            gsl_vector* x0 = gsl_vector_alloc(2);
            gsl_vector* step = gsl_vector_alloc(2);
            gsl_vector_set(x0, 0, t);
            gsl_vector_set(x0, 1, phi);
            gsl_vector_set_all(step, 0.3);
            gsl_multimin_fminimizer* m = gsl_multimin_fminimizer_alloc(type, 2);
            gsl_multimin_fminimizer_set(m, &fn, x0, step);
            for (int it = 0; it < 3000; ++it) {
                if (gsl_multimin_fminimizer_iterate(m)) break;
                if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(m), 1e-13) == GSL_SUCCESS) break;
            }
            double t1 = gsl_vector_get(m->x, 0), p1 = gsl_vector_get(m->x, 1);
            double d = std::sqrt(m->fval);
            if (d < out.defect) {
                out.defect = d;
                out.kappa = std::polar(std::exp(t1), p1);
            }
            gsl_multimin_fminimizer_free(m);
            gsl_vector_free(x0);
            gsl_vector_free(step);
        }
    // periods are linear in (1, Re κ, |κ|^2)
    LPeriod a = l_period(tp, k, 0.0), b = l_period(tp, k, 1.0), c = l_period(tp, k, cplx(0, 1));
    Eigen::Matrix2d A;
    Eigen::Vector2d rhs;
    for (int i = 0; i < 2; ++i) {
        double p0 = a.periods[i], pB = b.periods[i] - c.periods[i], pC = c.periods[i] - p0;
        A(i, 0) = pB;
        A(i, 1) = pC;
        rhs(i) = -p0;
    }
    out.kappa_closed_form = cplx(kNaN, kNaN);
    out.defect_closed_form = kNaN;
    if (std::abs(A.determinant()) > 1e-14 * std::max(1.0, A.cwiseAbs().maxCoeff() * A.cwiseAbs().maxCoeff())) {
        Eigen::Vector2d XY = A.partialPivLu().solve(rhs);
        if (XY(1) > XY(0) * XY(0)) {
            out.kappa_closed_form = cplx(XY(0), std::sqrt(XY(1) - XY(0) * XY(0)));
            out.defect_closed_form = l_period(tp, k, out.kappa_closed_form).defect;
        }
    }
    out.found = out.defect <= 1e-6;
    return out;
}

PeriodicLaplacian periodic_s_laplacian(const PeriodicSEmbedding& S) {
    const TorusPair& tp = *S.tp;
    const int L = tp.num_lambda(), Q = tp.num_quads();
    PeriodicLaplacian out;
    out.M = Eigen::MatrixXd::Zero(L, L);
    out.coefficients = Eigen::VectorXd::Zero(2 * Q + tp.num_corners());
    for (int z = 0; z < Q; ++z) {
        const auto& q = tp.quad(z);
        QuadGeometry g = quad_geometry(S.quad_points(z), S.Sz[z]);
        QuadCoefficients k = quad_coefficients(g, theta_from_x(S.x[z]));
        out.coefficients(2 * z) = k.a_bullet;
        out.coefficients(2 * z + 1) = k.a_circ;
        for (int p = 0; p < 2; ++p)
            for (int s = 0; s < 2; ++s) out.coefficients(2 * Q + q.corner[p][s]) += k.b[p][s];
        int b0 = q.vb[0], b1 = q.vb[1], c0 = tp.lambda_face(q.vc[0]), c1 = tp.lambda_face(q.vc[1]);
        auto pair = [&](int i, int j, double w) {
            out.M(i, j) += w;
            out.M(j, i) += w;
            out.M(i, i) -= w;
            out.M(j, j) -= w;
        };
        pair(b0, b1, k.a_bullet);
        pair(c0, c1, -k.a_circ);
        for (int p = 0; p < 2; ++p)
            for (int s = 0; s < 2; ++s) pair(q.vb[p], tp.lambda_face(q.vc[s]), k.b[p][s]);
    }
    return out;
}

Eigen::MatrixXcd periodic_dbar(const PeriodicSEmbedding& S, double* scale) {
    const TorusPair& tp = *S.tp;
    Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(tp.num_quads(), tp.num_lambda());
    double sc = 0;
    for (int z = 0; z < tp.num_quads(); ++z) {
        const auto& q = tp.quad(z);
        DbarRow row = dbar_row(S.quad_points(z), S.Sz[z]);
        int idx[4] = {q.vb[0], tp.lambda_face(q.vc[0]), q.vb[1], tp.lambda_face(q.vc[1])};
        for (int j = 0; j < 4; ++j) {
            D(z, idx[j]) += row.coef[j];
            sc = std::max(sc, std::abs(row.coef[j]));
        }
    }
    if (scale) *scale = sc;
    return D;
}

ProjectiveCheck projective_invariance(const PeriodicSEmbedding& a, const PeriodicSEmbedding& b) {
    Eigen::VectorXd ca = periodic_s_laplacian(a).coefficients, cb = periodic_s_laplacian(b).coefficients;
    ProjectiveCheck out;
    out.scale = ca.dot(cb) / ca.squaredNorm();
    out.deviation = (cb - out.scale * ca).cwiseAbs().maxCoeff() / cb.cwiseAbs().maxCoeff();
    return out;
}

PeriodicProperness periodic_properness(const PeriodicSEmbedding& S) {
    PeriodicProperness out;
    int pos = 0, neg = 0;
    double total = 0;
    for (int z = 0; z < S.tp->num_quads(); ++z) {
        auto p = S.quad_points(z);
        double area = 0;
        for (int i = 0; i < 4; ++i) area += 0.5 * std::imag(std::conj(p[i]) * p[(i + 1) % 4]);
        double sc = 0;
        for (int i = 0; i < 4; ++i) sc = std::max(sc, std::abs(p[i] - p[(i + 1) % 4]));
        if (area > 1e-12 * sc * sc)
            ++pos;
        else if (area < -1e-12 * sc * sc)
            ++neg;
        total += area;
        out.tangential_max = std::max(out.tangential_max, std::abs(std::abs(p[0] - p[1]) + std::abs(p[2] - p[3]) -
                                                                   std::abs(p[1] - p[2]) - std::abs(p[3] - p[0])));
    }
    double cell = std::imag(std::conj(S.periods[0]) * S.periods[1]);
    out.area_defect = std::abs(std::abs(total) - std::abs(cell)) / std::max(std::abs(cell), 1e-300);
    const int Q = S.tp->num_quads();
    out.proper = pos == Q && cell > 0 && out.area_defect < 1e-9;
    out.conjugate = neg == Q && cell < 0 && out.area_defect < 1e-9;
    return out;
}

int numerical_kernel_dim(const Eigen::MatrixXcd& A, double rel_tol, double scale) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
    const auto& sv = svd.singularValues();
    double smax = std::max(sv.size() ? sv(0) : 0.0, scale);
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > rel_tol * smax) ++rank;
    return static_cast<int>(A.cols()) - rank;
}

HarnessReport conjecture_harness(const TorusPair& tp, const std::vector<double>& x) {
    HarnessReport rep;
    rep.kernel = periodic_kernel(tp, x);
    if (rep.kernel.dimension != 2) {
        rep.note = "kernel dimension " + std::to_string(rep.kernel.dimension) + ": no spinor pair, harness skipped";
        return rep;
    }
    rep.kappa = find_kappa_L(tp, rep.kernel);
    for (double r : {0.25, 1.0, 4.0})
        for (double phi : {-7 * M_PI / 8, -M_PI / 2, -M_PI / 8, M_PI / 8, M_PI / 2, 7 * M_PI / 8}) {
            HarnessReport::GridPoint gp;
            gp.kappa = std::polar(r, phi);
            try {
                PeriodicProperness pp = periodic_properness(build_periodic_sembedding(tp, x, rep.kernel, gp.kappa));
                gp.proper = pp.proper;
                gp.conjugate = pp.conjugate;
                gp.area_defect = pp.area_defect;
            } catch (const Error&) {
                gp.area_defect = kNaN;
            }
            rep.grid.push_back(gp);
        }
    cplx kl = rep.kappa.kappa;
    cplx off = kl * 1.3 + cplx(0.2, 0.0);
    try {
        PeriodicSEmbedding SL = build_periodic_sembedding(tp, x, rep.kernel, kl);
        PeriodicSEmbedding So = build_periodic_sembedding(tp, x, rep.kernel, off);
        rep.tau_at_kappa_L = SL.tau;
        PeriodicLaplacian lap = periodic_s_laplacian(SL);
        rep.laplacian_kernel_dim = numerical_kernel_dim(lap.M.cast<cplx>(), 1e-8, lap.coefficients.cwiseAbs().maxCoeff());
        double sL = 0, so = 0;
        Eigen::MatrixXcd DL = periodic_dbar(SL, &sL), Do = periodic_dbar(So, &so);
        rep.dbar_kernel_dim_at_L = numerical_kernel_dim(DL, 1e-8, sL);
        rep.dbar_kernel_dim_off_L = numerical_kernel_dim(Do, 1e-8, so);
        rep.projective_deviation = projective_invariance(SL, So).deviation;
        // Δ_S S^2 from the lifted quads; it is periodic since Δ_S S = Δ_S 1 = 0
        const int L = tp.num_lambda();
        Eigen::VectorXcd g = Eigen::VectorXcd::Zero(L);
        for (int z = 0; z < tp.num_quads(); ++z) {
            const auto& q = tp.quad(z);
            auto p = SL.quad_points(z);
            QuadCoefficients k = quad_coefficients(quad_geometry(p, SL.Sz[z]), theta_from_x(x[z]));
            int idx[4] = {q.vb[0], tp.lambda_face(q.vc[0]), q.vb[1], tp.lambda_face(q.vc[1])};
            auto sq = [&](int j) { return p[j] * p[j]; };
            auto pair = [&](int i, int j, double w) {
                g(idx[i]) += w * (sq(j) - sq(i));
                g(idx[j]) += w * (sq(i) - sq(j));
            };
            pair(0, 2, k.a_bullet);
            pair(1, 3, -k.a_circ);
            for (int pp = 0; pp < 2; ++pp)
                for (int s = 0; s < 2; ++s) pair(2 * pp, 2 * s + 1, k.b[pp][s]);
        }
        Eigen::MatrixXcd Mc = lap.M.cast<cplx>();
        const double cs = lap.coefficients.cwiseAbs().maxCoeff();
        Eigen::VectorXcd rho = Mc.completeOrthogonalDecomposition().solve(-g);
        double gs = std::max(g.cwiseAbs().maxCoeff(), cs);
        rep.rho_defect = (Mc * rho + g).cwiseAbs().maxCoeff() / gs;
        rep.rho_norm = rho.cwiseAbs().maxCoeff();
    } catch (const Error& e) {
        rep.note = e.what();
    }
    return rep;
}

TuneResult tune_to_criticality(const TorusPair& tp, std::vector<double>& x, int edge, double lo, double hi) {
    if (edge < 0 || edge >= tp.num_quads() || !(0 < lo && lo < hi && hi < 1)) throw InputError("bad tuning range");
    auto smallest = [&](double xe) {
        std::vector<double> y = x;
        y[edge] = xe;
        return periodic_kernel(tp, y).singular_values[0];
    };
    auto res = boost::math::tools::brent_find_minima(smallest, lo, hi, std::numeric_limits<double>::digits / 2);
    x[edge] = res.first;
    PeriodicKernel k = periodic_kernel(tp, x);
    TuneResult out;
    out.x = res.first;
    out.sigma_min = k.singular_values[0];
    out.sigma_second = k.singular_values[1];
    out.sigma_third = k.singular_values.size() > 2 ? k.singular_values[2] : kNaN;
    out.dimension = k.dimension;
    return out;
}

} // namespace isingkit
