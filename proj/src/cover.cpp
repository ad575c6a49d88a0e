#include "isingkit/cover.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "isingkit/errors.hpp"

namespace isingkit {

cplx dirac_eta(cplx d, cplx varsigma) {
    if (std::abs(d) == 0.0) throw GeometryError("degenerate corner: v(c) = u(c)");
    return varsigma * std::polar(1.0, -0.5 * std::arg(d));
}

namespace {

// Signed angle swept by the vector v - u when one endpoint moves along a
// straight segment; returns NaN when the move passes through the other end.
double swept_angle(cplx from, cplx to) {
    double a = std::arg(to / from);
    if (std::abs(std::abs(a) - M_PI) < 1e-9) return std::nan("");
    return a;
}

int continuation_sign(cplx eta_a, cplx eta_b, double delta) {
    cplx cont = eta_a * std::polar(1.0, -0.5 * delta);
    return std::real(eta_b * std::conj(cont)) >= 0 ? 1 : -1;
}

} // namespace

DiracPhase::DiracPhase(const DualPair& dp, cplx varsigma) : varsigma_(varsigma) {
    const int C = dp.num_corners();
    eta_.resize(C);
    for (int c = 0; c < C; ++c) eta_[c] = dirac_eta(dp.corner_v(c) - dp.corner_u(c), varsigma);
    geometric_ = geometric_signs(dp);
    if (!geometric_) combinatorial_signs(dp);
}

bool DiracPhase::geometric_signs(const DualPair& dp) {
    const auto& ue = dp.ups_edges();
    const PlanarMap& m = dp.map();
    const int K = static_cast<int>(ue.size());
    sign_.assign(K, 0);
    // boundary half-edges entering and leaving each vertex (domain on the left)
    std::vector<int> h_in(m.num_vertices(), -1), h_out(m.num_vertices(), -1);
    for (int h : m.boundary_walk()) {
        h_out[m.tail(h)] = h;
        h_in[m.head(h)] = h;
    }
    for (int k = 0; k < K; ++k) {
        int a = ue[k].a, b = ue[k].b;
        cplx va = dp.corner_v(a), vb = dp.corner_v(b), ua = dp.corner_u(a), ub = dp.corner_u(b);
        double d = swept_angle(va - ua, vb - ub);
        bool same_v = dp.corner(a).vgeo == dp.corner(b).vgeo;
        bool same_u = dp.corner(a).vc == dp.corner(b).vc;
        if (ue[k].kind != UpsKind::Quad && !(same_u || same_v)) d = std::nan("");
        int v = dp.corner(a).vgeo;
        if (ue[k].kind == UpsKind::WiredTriangle && same_v && h_in[v] >= 0 && h_out[v] >= 0) {
            // u turns around v through the exterior sector, from the reversed
            // incoming boundary edge counterclockwise to the outgoing one
            double a0 = std::arg(m.vec(PlanarMap::twin(h_in[v])));
            double ext = std::fmod(std::arg(m.vec(h_out[v])) - a0 + 4 * M_PI, 2 * M_PI);
            double d0 = std::arg((vb - ub) / (va - ua));
            for (double cand : {d0, d0 > 0 ? d0 - 2 * M_PI : d0 + 2 * M_PI}) {
                double mid = std::arg((ua - va) * std::polar(1.0, 0.5 * cand));
                double off = std::fmod(mid - a0 + 4 * M_PI, 2 * M_PI);
                if (off < ext) d = cand;
            }
        }
        if (std::isnan(d)) {
            if (ue[k].kind == UpsKind::Quad) return false;  // move passes through a lattice point
            continue;
        }
        sign_[k] = continuation_sign(eta_[a], eta_[b], d);
    }
    // boundary triangles left undetermined by geometry: complete so that the
    // closed face containing them has holonomy -1
    for (int k = 0; k < K; ++k) {
        if (sign_[k] != 0) continue;
        int f = ue[k].face_l == dp.outer_face() ? ue[k].face_r : ue[k].face_l;
        const auto& cyc = dp.face_cycle(f);
        if (cyc.empty()) { sign_[k] = 1; continue; }
        int prod = -1;
        for (int j : cyc)
            if (j != k) {
                if (sign_[j] == 0) sign_[j] = 1;
                prod *= sign_[j];
            }
        sign_[k] = prod;
    }
    return holonomy_ok(dp);
}

bool DiracPhase::holonomy_ok(const DualPair& dp) const {
    for (int f = 0; f < dp.num_ups_faces(); ++f) {
        if (!dp.face_is_closed(f)) continue;
        int prod = 1;
        for (int j : dp.face_cycle(f)) prod *= sign_[j];
        if (prod != -1) return false;
    }
    return true;
}

// Peel closed faces with a single undetermined edge; edges that only border
// the outer face are free and set to +1 when peeling stalls.
void DiracPhase::combinatorial_signs(const DualPair& dp) {
    const auto& ue = dp.ups_edges();
    const int K = static_cast<int>(ue.size());
    sign_.assign(K, 0);
    // spanning forest of Υ gets +1
    std::vector<int> comp(dp.num_corners());
    for (int c = 0; c < dp.num_corners(); ++c) comp[c] = c;
    auto find = [&](int c) {
        while (comp[c] != c) c = comp[c] = comp[comp[c]];
        return c;
    };
    for (int k = 0; k < K; ++k) {
        int a = find(ue[k].a), b = find(ue[k].b);
        if (a != b) {
            comp[a] = b;
            sign_[k] = 1;
        }
    }
    for (;;) {
        bool progress = false;
        for (int f = 0; f < dp.num_ups_faces(); ++f) {
            if (!dp.face_is_closed(f)) continue;
            int open = -1, nopen = 0, prod = -1;
            for (int j : dp.face_cycle(f)) {
                if (sign_[j] == 0) {
                    open = j;
                    ++nopen;
                } else {
                    prod *= sign_[j];
                }
            }
            if (nopen == 1) {
                sign_[open] = prod;
                progress = true;
            }
        }
        if (progress) continue;
        int pick = -1;
        for (int k = 0; k < K && pick < 0; ++k)
            if (sign_[k] == 0 && (!dp.face_is_closed(ue[k].face_l) || !dp.face_is_closed(ue[k].face_r))) pick = k;
        if (pick < 0) break;
        sign_[pick] = 1;
    }
    for (int k = 0; k < K; ++k)
        if (sign_[k] == 0) sign_[k] = 1;
    if (!holonomy_ok(dp)) throw GeometryError("no double cover of Υ branches around every closed face");
}

std::vector<int> branch_cut_parity(const DualPair& dp, const BranchSet& branch, std::vector<int>* edges) {
    const auto& ue = dp.ups_edges();
    const int NF = dp.num_ups_faces();
    std::vector<std::vector<std::pair<int, int>>> adj(NF);
    for (int k = 0; k < int(ue.size()); ++k) {
        adj[ue[k].face_l].push_back({ue[k].face_r, k});
        adj[ue[k].face_r].push_back({ue[k].face_l, k});
    }
    for (auto& a : adj) std::sort(a.begin(), a.end());
    std::vector<int> parity(ue.size(), 0);
    auto cut_from = [&](int f0) {
        if (f0 == dp.outer_face()) return;
        std::vector<int> prev_edge(NF, -1), prev_face(NF, -1);
        std::vector<char> seen(NF, 0);
        std::queue<int> q;
        q.push(f0);
        seen[f0] = 1;
        while (!q.empty()) {
            int f = q.front();
            q.pop();
            if (f == dp.outer_face()) break;
            for (auto [g, k] : adj[f])
                if (!seen[g]) {
                    seen[g] = 1;
                    prev_edge[g] = k;
                    prev_face[g] = f;
                    q.push(g);
                }
        }
        if (!seen[dp.outer_face()]) throw GeometryError("branch point cannot reach the outer face");
        for (int f = dp.outer_face(); f != f0; f = prev_face[f]) {
            parity[prev_edge[f]] ^= 1;
            if (edges) edges->push_back(prev_edge[f]);
        }
    };
    for (int b : branch.bullets) cut_from(dp.face_of_bullet(b));
    for (int c : branch.circs) cut_from(dp.face_of_circ(c));
    return parity;
}

DoubleCover DoubleCover::psi(const DualPair& dp, const BranchSet& branch) {
    DoubleCover cv;
    cv.dp_ = &dp;
    cv.chi_ = false;
    cv.branch_ = branch;
    auto par = branch_cut_parity(dp, branch, &cv.cut_edges_);
    cv.cut_.resize(par.size());
    cv.sign_.resize(par.size());
    for (size_t k = 0; k < par.size(); ++k) cv.sign_[k] = cv.cut_[k] = par[k] ? -1 : 1;
    return cv;
}

DoubleCover DoubleCover::chi(const DualPair& dp, const BranchSet& branch, cplx varsigma) {
    DoubleCover cv = psi(dp, branch);
    cv.chi_ = true;
    cv.dirac_ = std::make_shared<DiracPhase>(dp, varsigma);
    for (size_t k = 0; k < cv.sign_.size(); ++k) cv.sign_[k] = cv.cut_[k] * cv.dirac_->geo_sign(int(k));
    return cv;
}

int DoubleCover::transport(int a, int b) const {
    int k = dp_->ups_edge_between(a, b);
    if (k < 0) throw InputError("corners " + std::to_string(a) + " and " + std::to_string(b) + " are not adjacent");
    return sign_[k];
}

int DoubleCover::holonomy(const std::vector<int>& cyc) const {
    int s = 1;
    for (size_t i = 0; i < cyc.size(); ++i) s *= transport(cyc[i], cyc[(i + 1) % cyc.size()]);
    return s;
}

} // namespace isingkit
