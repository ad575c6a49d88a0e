#include "isingkit/dual_pair.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <tuple>

#include "isingkit/errors.hpp"

namespace isingkit {

namespace {

struct UnionFind {
    std::vector<int> p;
    explicit UnionFind(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
    int find(int x) { return p[x] == x ? x : p[x] = find(p[x]); }
    void unite(int a, int b) { p[find(a)] = find(b); }
};

cplx reflect(cplx p, cplx a, cplx b) {
    cplx d = (b - a) / std::abs(b - a);
    cplx r = (p - a) / d;
    return a + std::conj(r) * d;
}

} // namespace

DualPair::DualPair(PlanarMap map) : map_(std::move(map)) {
    const PlanarMap& m = map_;
    const int V = m.num_vertices(), E = m.num_edges();
    if (E > 0 && !m.boundary_is_simple())
        throw BoundaryError("dual pair requires the outer boundary to be a simple cycle");

    // G• classes
    UnionFind uf(V);
    std::vector<char> on_free(V, 0);
    for (auto& arc : m.arcs())
        if (arc.type == ArcType::Free)
            for (int e : arc.edges) {
                uf.unite(m.edge(e)[0], m.edge(e)[1]);
                on_free[m.edge(e)[0]] = on_free[m.edge(e)[1]] = 1;
            }
    bullet_of_.assign(V, -1);
    std::vector<int> root_id(V, -1);
    for (int v = 0; v < V; ++v) {
        int r = uf.find(v);
        if (root_id[r] < 0) {
            root_id[r] = num_bullet();
            bullet_members_.emplace_back();
            bullet_macro_.push_back(0);
            bullet_pos_.push_back(0);
        }
        int b = root_id[r];
        bullet_of_[v] = b;
        bullet_members_[b].push_back(v);
        if (on_free[v]) bullet_macro_[b] = 1;
    }
    for (int b = 0; b < num_bullet(); ++b) {
        cplx s = 0;
        for (int v : bullet_members_[b]) s += m.position(v);
        bullet_pos_[b] = s / double(bullet_members_[b].size());
    }

    // G° vertices
    face_circ_.assign(m.num_faces(), -1);
    for (int f = 0; f < m.num_faces(); ++f) {
        if (f == m.outer_face()) continue;
        face_circ_[f] = num_circ();
        circ_pos_.push_back(m.face_center(f));
        circ_wired_.push_back(0);
        circ_face_.push_back(f);
        circ_edge_.push_back(-1);
    }
    edge_wired_circ_.assign(E, -1);
    for (int h : m.boundary_walk()) {
        int e = PlanarMap::edge_of(h);
        if (m.arcs()[m.edge_arc(e)].type != ArcType::Wired) continue;
        edge_wired_circ_[e] = num_circ();
        cplx inner = m.face_center(m.face(h));
        circ_pos_.push_back(reflect(inner, m.position(m.tail(h)), m.position(m.head(h))));
        circ_wired_.push_back(1);
        circ_face_.push_back(-1);
        circ_edge_.push_back(e);
    }

    std::map<std::tuple<int, int, int>, int> corner_index;
    auto get_corner = [&](int v, int keyh, int c) {
        auto key = std::make_tuple(v, keyh, c);
        auto it = corner_index.find(key);
        if (it != corner_index.end()) return it->second;
        int id = num_corners();
        Corner cr;
        cr.vgeo = v;
        cr.vb = bullet_of_[v];
        cr.vc = c;
        corners_.push_back(cr);
        corner_index[key] = id;
        return id;
    };
    auto circ_of_side = [&](int h) {
        int f = m.face(h);
        if (f == m.outer_face()) return edge_wired_circ_[PlanarMap::edge_of(h)];
        return face_circ_[f];
    };

    // quads
    edge_quad_.assign(E, -1);
    for (int e = 0; e < E; ++e) {
        if (edge_is_free(e)) continue;
        int h = 2 * e, t = PlanarMap::twin(h);
        Quad q;
        q.z = num_quads();
        q.edge = e;
        q.half_edge = h;
        q.vgeo = {m.tail(h), m.head(h)};
        q.vb = {bullet_of_[m.tail(h)], bullet_of_[m.head(h)]};
        q.vc = {circ_of_side(t), circ_of_side(h)};
        q.corner[0][1] = get_corner(m.tail(h), h, q.vc[1]);
        q.corner[0][0] = get_corner(m.tail(h), m.rot_prev(h), q.vc[0]);
        q.corner[1][0] = get_corner(m.head(h), t, q.vc[0]);
        q.corner[1][1] = get_corner(m.head(h), m.rot_prev(t), q.vc[1]);
        edge_quad_[e] = q.z;
        quads_.push_back(q);
    }
    for (auto& q : quads_)
        for (int p = 0; p < 2; ++p)
            for (int s = 0; s < 2; ++s) {
                auto& cq = corners_[q.corner[p][s]].quads;
                if (cq[0] < 0) cq[0] = q.z;
                else cq[1] = q.z;
            }

    const int Q = num_quads();
    auto add_edge = [&](int a, int b, UpsKind kind, int z, int fl, int fr) {
        UpsEdge ue;
        ue.a = a;
        ue.b = b;
        ue.kind = kind;
        ue.quad = z;
        ue.face_l = fl;
        ue.face_r = fr;
        ups_edges_.push_back(ue);
    };
    for (auto& q : quads_) {
        add_edge(q.corner[0][0], q.corner[1][0], UpsKind::Quad, q.z, q.z, face_of_circ(q.vc[0]));
        add_edge(q.corner[1][0], q.corner[1][1], UpsKind::Quad, q.z, q.z, face_of_bullet(q.vb[1]));
        add_edge(q.corner[1][1], q.corner[0][1], UpsKind::Quad, q.z, q.z, face_of_circ(q.vc[1]));
        add_edge(q.corner[0][1], q.corner[0][0], UpsKind::Quad, q.z, q.z, face_of_bullet(q.vb[0]));
    }
    // boundary triangles
    const auto& bw = m.boundary_walk();
    const int B = static_cast<int>(bw.size());
    for (int i = 0; i < B; ++i) {
        int h = bw[i];
        int e = PlanarMap::edge_of(h);
        if (edge_is_free(e)) {
            int f = face_circ_[m.face(h)];
            int ca = get_corner(m.tail(h), h, f);
            int cb = get_corner(m.head(h), m.rot_prev(PlanarMap::twin(h)), f);
            add_edge(ca, cb, UpsKind::FreeTriangle, -1, face_of_circ(f), outer_face());
        }
    }
    for (int i = 0; i < B; ++i) {
        int h1 = bw[i], h2 = bw[(i + 1) % B];
        int e1 = PlanarMap::edge_of(h1), e2 = PlanarMap::edge_of(h2);
        if (B < 2 || e1 == e2 || edge_is_free(e1) || edge_is_free(e2)) continue;
        int a = m.head(h1);
        auto find_corner = [&](int e) {
            const Quad& q = quads_[edge_quad_[e]];
            int u = edge_wired_circ_[e];
            for (int p = 0; p < 2; ++p)
                for (int s = 0; s < 2; ++s)
                    if (q.vgeo[p] == a && q.vc[s] == u) return q.corner[p][s];
            throw GeometryError("wired corner lookup failed");
        };
        add_edge(find_corner(e1), find_corner(e2), UpsKind::WiredTriangle, -1,
                 face_of_bullet(bullet_of_[a]), outer_face());
    }

    corner_edges_.assign(num_corners(), {});
    for (int k = 0; k < int(ups_edges_.size()); ++k) {
        corner_edges_[ups_edges_[k].a].push_back(k);
        corner_edges_[ups_edges_[k].b].push_back(k);
    }
    (void)Q;
    build_faces();
}

bool DualPair::edge_is_free(int e) const {
    int a = map_.edge_arc(e);
    return a >= 0 && map_.arcs()[a].type == ArcType::Free;
}

int DualPair::first_wired_circ() const {
    for (int c = 0; c < num_circ(); ++c)
        if (circ_wired_[c]) return c;
    return -1;
}

int DualPair::face_of_bullet(int b) const {
    return bullet_macro_[b] ? outer_face() : num_quads() + b;
}

int DualPair::face_of_circ(int c) const {
    return circ_wired_[c] ? outer_face() : num_quads() + num_bullet() + c;
}

int DualPair::ups_edge_between(int a, int b) const {
    for (int k : corner_edges_[a])
        if ((ups_edges_[k].a == a && ups_edges_[k].b == b) || (ups_edges_[k].a == b && ups_edges_[k].b == a))
            return k;
    return -1;
}

void DualPair::build_faces() {
    const int NF = num_ups_faces();
    std::vector<std::vector<int>> edges_of(NF);
    for (int k = 0; k < int(ups_edges_.size()); ++k) {
        edges_of[ups_edges_[k].face_l].push_back(k);
        edges_of[ups_edges_[k].face_r].push_back(k);
    }
    face_cycle_.assign(NF, {});
    for (int f = 0; f < NF; ++f) {
        if (f == outer_face() || edges_of[f].size() < 2) continue;
        std::map<int, std::vector<int>> inc;
        for (int k : edges_of[f]) {
            inc[ups_edges_[k].a].push_back(k);
            inc[ups_edges_[k].b].push_back(k);
        }
        bool ok = true;
        for (auto& [c, ks] : inc)
            if (ks.size() != 2) ok = false;
        if (!ok) continue;
        std::vector<int> cyc;
        int k = edges_of[f][0];
        int c = ups_edges_[k].b;
        std::vector<char> used(ups_edges_.size(), 0);
        while (!used[k]) {
            used[k] = 1;
            cyc.push_back(k);
            auto& ks = inc[c];
            int nk = (ks[0] == k) ? ks[1] : ks[0];
            c = (ups_edges_[nk].a == c) ? ups_edges_[nk].b : ups_edges_[nk].a;
            k = nk;
        }
        if (cyc.size() == edges_of[f].size()) face_cycle_[f] = cyc;
    }
}

cplx DualPair::face_point(int f) const {
    const int Q = num_quads(), B = num_bullet();
    if (f < Q) {
        const Quad& q = quads_[f];
        return 0.25 * (map_.position(q.vgeo[0]) + map_.position(q.vgeo[1]) + circ_pos_[q.vc[0]] + circ_pos_[q.vc[1]]);
    }
    if (f < Q + B) return bullet_pos_[f - Q];
    if (f < Q + B + num_circ()) return circ_pos_[f - Q - B];
    double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan};
}

std::vector<int> DualPair::corners_around_bullet(int b) const {
    std::vector<int> out;
    if (bullet_macro_[b]) return out;
    int f = face_of_bullet(b);
    const auto& cyc = face_cycle_[f];
    if (cyc.empty()) return out;
    // walk the cycle and orient counterclockwise around the vertex
    int c0 = ups_edges_[cyc[0]].a, c1 = ups_edges_[cyc[0]].b;
    int k1 = cyc.size() > 1 ? cyc[1] : cyc[0];
    int start = (ups_edges_[k1].a == c1 || ups_edges_[k1].b == c1) ? c0 : c1;
    int c = start;
    for (int k : cyc) {
        out.push_back(c);
        c = (ups_edges_[k].a == c) ? ups_edges_[k].b : ups_edges_[k].a;
    }
    cplx v = bullet_pos_[b];
    double wind = 0;
    for (size_t i = 0; i < out.size(); ++i)
        wind += std::arg((corner_u(out[(i + 1) % out.size()]) - v) / (corner_u(out[i]) - v));
    if (wind < 0) std::reverse(out.begin(), out.end());
    return out;
}

std::vector<int> DualPair::corners_around_circ(int c) const {
    std::vector<int> out;
    if (circ_wired_[c]) return out;
    int f = face_of_circ(c);
    const auto& cyc = face_cycle_[f];
    if (cyc.empty()) return out;
    int c0 = ups_edges_[cyc[0]].a, c1 = ups_edges_[cyc[0]].b;
    int k1 = cyc.size() > 1 ? cyc[1] : cyc[0];
    int start = (ups_edges_[k1].a == c1 || ups_edges_[k1].b == c1) ? c0 : c1;
    int x = start;
    for (int k : cyc) {
        out.push_back(x);
        x = (ups_edges_[k].a == x) ? ups_edges_[k].b : ups_edges_[k].a;
    }
    cplx u = circ_pos_[c];
    double wind = 0;
    for (size_t i = 0; i < out.size(); ++i)
        wind += std::arg((corner_v(out[(i + 1) % out.size()]) - u) / (corner_v(out[i]) - u));
    if (wind < 0) std::reverse(out.begin(), out.end());
    return out;
}

std::vector<int> DualPair::quads_around_vertex(int v) const {
    std::vector<int> out;
    for (int h : map_.outgoing(v)) {
        int z = edge_quad_[PlanarMap::edge_of(h)];
        if (z >= 0) out.push_back(z);
    }
    return out;
}

bool DualPair::bullet_is_interior(int b) const {
    if (bullet_macro_[b]) return false;
    for (int v : bullet_members_[b])
        for (int h : map_.outgoing(v))
            if (map_.is_boundary_edge(PlanarMap::edge_of(h))) return false;
    return true;
}

bool DualPair::circ_is_interior(int c) const {
    if (circ_wired_[c]) return false;
    for (int h : map_.face_walk(circ_face_[c]))
        if (edge_is_free(PlanarMap::edge_of(h))) return false;
    return true;
}

} // namespace isingkit
