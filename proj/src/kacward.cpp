#include "isingkit/kacward.hpp"

#include <cmath>

#include "isingkit/errors.hpp"
#include "isingkit/ising_enum.hpp"

namespace isingkit {

namespace {

template <class M>
typename M::Scalar pfaffian_impl(M A, double tol) {
    using S = typename M::Scalar;
    const int n = static_cast<int>(A.rows());
    if (A.cols() != n) throw ShapeError("pfaffian needs a square matrix");
    if (n % 2 == 1) throw ShapeError("pfaffian of odd dimension " + std::to_string(n));
    double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
    if ((A + A.transpose()).cwiseAbs().maxCoeff() > tol * scale) throw InputError("matrix is not antisymmetric");
    S pf = S(1);
    for (int k = 0; k + 1 < n; k += 2) {
        int kp = k + 1;
        for (int j = k + 2; j < n; ++j)
            if (std::abs(A(j, k)) > std::abs(A(kp, k))) kp = j;
        if (kp != k + 1) {
            A.row(k + 1).swap(A.row(kp));
            A.col(k + 1).swap(A.col(kp));
            pf = -pf;
        }
        if (A(k + 1, k) == S(0)) return S(0);
        pf *= A(k, k + 1);
        if (k + 2 < n) {
            const int r = n - k - 2;
            auto tau = (A.row(k).tail(r) / A(k, k + 1)).transpose().eval();
            auto col = A.col(k + 1).tail(r).eval();
            A.bottomRightCorner(r, r) += tau * col.transpose() - col * tau.transpose();
        }
    }
    return pf;
}

double wrap_angle(double a) { return std::remainder(a, 2.0 * M_PI); }

IsingWeights normalized(const DualPair& dp, IsingWeights w) {
    w.normalize(dp);
    return w;
}

} // namespace

double pfaffian(Eigen::MatrixXd A, double tol) { return pfaffian_impl(std::move(A), tol); }
cplx pfaffian(Eigen::MatrixXcd A, double tol) { return pfaffian_impl(std::move(A), tol); }

KacWard::KacWard(const PlanarMap& m, const IsingWeights& w) : m_(&m) {
    const int H = m.num_half_edges();
    if (int(w.x.size()) != m.num_edges()) throw InputError("weight vector size does not match the edge count");
    index_.assign(H, -1);
    for (int v = 0; v < m.num_vertices(); ++v)
        for (int h : m.outgoing(v)) {
            index_[h] = static_cast<int>(half_.size());
            half_.push_back(h);
        }
    for (int e = 0; e < m.num_edges(); ++e)
        if (std::abs(m.vec(2 * e)) == 0.0) throw GeometryError("zero-length edge " + std::to_string(e));
    const int N = size();
    t_ = Eigen::MatrixXcd::Zero(N, N);
    for (int i = 0; i < N; ++i) {
        int h = half_[i];
        double xh = w.x[PlanarMap::edge_of(h)];
        for (int g : m.outgoing(m.head(h))) {
            if (g == PlanarMap::twin(h)) continue;
            double xg = w.x[PlanarMap::edge_of(g)];
            t_(i, index_[g]) = std::polar(std::sqrt(xh * xg), 0.5 * turn(h, g));
        }
    }
    kw_ = Eigen::MatrixXcd::Identity(N, N) - t_;
}

double KacWard::turn(int h, int g) const { return std::arg(m_->vec(g) / m_->vec(h)); }

cplx KacWard::det() const {
    if (size() == 0) return 1.0;
    return kw_.partialPivLu().determinant();
}

Eigen::MatrixXcd KacWard::k_hat_complex(cplx varsigma) const {
    const int N = size();
    Eigen::VectorXcd eta(N);
    for (int i = 0; i < N; ++i) eta(i) = dirac_eta(m_->vec(half_[i]), varsigma);
    Eigen::MatrixXcd JK(N, N);
    for (int i = 0; i < N; ++i) JK.row(i) = kw_.row(index_[PlanarMap::twin(half_[i])]);
    return cplx(0, 1) * eta.conjugate().asDiagonal() * JK * eta.asDiagonal();
}

Eigen::MatrixXd KacWard::k_hat(cplx varsigma, double real_tol) const {
    Eigen::MatrixXcd K = k_hat_complex(varsigma);
    if (K.size() > 0 && K.imag().cwiseAbs().maxCoeff() > real_tol)
        throw GeometryError("K̂ is not real for this embedding");
    return K.real();
}

KacWardReport verify_kac_ward(const DualPair& dp, const IsingWeights& w0, cplx varsigma) {
    IsingWeights w = w0;
    w.normalize(dp);
    KacWard kw(dp.map(), w);
    IsingEnumerator en(dp, w);
    KacWardReport r;
    cplx d = kw.det();
    r.det_kw = d.real();
    r.det_kw_imag = d.imag();
    r.z_squared = en.Z() * en.Z();
    r.rel_err = std::abs(d - r.z_squared) / r.z_squared;
    Eigen::MatrixXcd K = kw.k_hat_complex(varsigma);
    if (K.size() > 0) {
        r.khat_antisym = (K + K.transpose()).cwiseAbs().maxCoeff();
        r.khat_imag = K.imag().cwiseAbs().maxCoeff();
        r.pf_khat = pfaffian(Eigen::MatrixXd(K.real()));
    } else {
        r.pf_khat = 1.0;
    }
    r.pf_ratio = std::abs(r.pf_khat) / en.Z();
    return r;
}

KacWardFermions::KacWardFermions(const DualPair& dp, const IsingWeights& w, cplx varsigma)
    : dp_(&dp), w_(normalized(dp, w)), kw_(dp.map(), w_) {
    const PlanarMap& m = dp.map();
    if (kw_.size() > 0) kinv_ = kw_.k_hat(varsigma).inverse();
    const int C = dp.num_corners();
    pendant_.resize(C);
    left_.resize(C);
    right_.resize(C);
    for (int c = 0; c < C; ++c) {
        cplx b = dp.corner_u(c) - dp.corner_v(c);
        if (std::abs(b) == 0.0) throw GeometryError("corner " + std::to_string(c) + " has coincident v and u");
        pendant_[c] = b;
        for (int g : m.outgoing(dp.corner(c).vgeo)) {
            cplx eta = dirac_eta(m.vec(g), varsigma);
            double sx = std::sqrt(w_.x[PlanarMap::edge_of(g)]);
            // walk enters v along the pendant, leaves along g
            double t_in = wrap_angle(std::arg(m.vec(g) / -b));
            // walk arrives along twin(g), leaves into the pendant
            double t_out = wrap_angle(std::arg(b / m.vec(PlanarMap::twin(g))));
            left_[c].push_back({kw_.index(g), sx * std::polar(1.0, 0.5 * t_in) * eta});
            right_[c].push_back({kw_.index(g), sx * std::polar(1.0, 0.5 * t_out) * std::conj(eta)});
        }
    }
}

bool KacWardFermions::resolvable(int c, int d) const {
    return dp_->corner(c).vb != dp_->corner(d).vb;
}

double KacWardFermions::fast(int c, int d) const {
    cplx P = 0;
    for (auto [i, a] : left_[c])
        for (auto [j, b] : right_[d]) P += a * kinv_(i, j) * b;
    double ends = std::arg(pendant_[d]) - std::arg(pendant_[c]) - M_PI;
    return (cplx(0, 1) * P * std::polar(1.0, -0.5 * ends)).real();
}

double KacWardFermions::two_point(int c, int d) const {
    const int C = dp_->num_corners();
    if (c < 0 || c >= C || d < 0 || d >= C) throw InputError("corner out of range");
    if (c == d) throw InputError("coincident corner insertions");
    if (resolvable(c, d)) return fast(c, d);
    if (!oracle_) oracle_ = std::make_unique<IsingEnumerator>(*dp_, w_);
    if (fallbacks_++ == 0)
        warnings_.push_back("corners " + std::to_string(c) + " and " + std::to_string(d) +
                            " share a G• vertex; such pairs are taken from the enumeration oracle");
    return oracle_->correlator({{}, {}, {c, d}});
}

Eigen::MatrixXd KacWardFermions::two_point_matrix(const std::vector<int>& corners) const {
    const int k = static_cast<int>(corners.size());
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
            M(i, j) = two_point(corners[i], corners[j]);
            M(j, i) = -M(i, j);
        }
    return M;
}

double KacWardFermions::correlator(const std::vector<int>& corners) const {
    if (corners.size() % 2 == 1) throw ShapeError("odd number of corner insertions");
    if (corners.empty()) return 1.0;
    return pfaffian(two_point_matrix(corners));
}

} // namespace isingkit
