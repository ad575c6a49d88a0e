#include "isingkit/planar_map.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "isingkit/errors.hpp"

namespace isingkit {

namespace {

double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }
double dot(cplx a, cplx b) { return a.real() * b.real() + a.imag() * b.imag(); }

int orient(cplx a, cplx b, cplx c, double eps) {
    double v = cross(b - a, c - a);
    double scale = std::abs(b - a) * std::abs(c - a);
    if (std::abs(v) <= eps * std::max(scale, 1e-300)) return 0;
    return v > 0 ? 1 : -1;
}

bool on_segment(cplx a, cplx b, cplx p) {
    return std::min(a.real(), b.real()) - 1e-12 <= p.real() &&
           p.real() <= std::max(a.real(), b.real()) + 1e-12 &&
           std::min(a.imag(), b.imag()) - 1e-12 <= p.imag() &&
           p.imag() <= std::max(a.imag(), b.imag()) + 1e-12;
}

bool point_in_polygon(cplx p, const std::vector<cplx>& poly) {
    bool inside = false;
    size_t n = poly.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        cplx a = poly[i], b = poly[j];
        if ((a.imag() > p.imag()) != (b.imag() > p.imag())) {
            double x = a.real() + (p.imag() - a.imag()) * (b.real() - a.real()) / (b.imag() - a.imag());
            if (p.real() < x) inside = !inside;
        }
    }
    return inside;
}

double dist_to_segment(cplx p, cplx a, cplx b) {
    cplx d = b - a;
    double t = std::clamp(dot(p - a, d) / std::norm(d), 0.0, 1.0);
    return std::abs(p - (a + t * d));
}

cplx polygon_center(const std::vector<cplx>& poly) {
    // circumcenter when inscribed with the center strictly inside
    size_t n = poly.size();
    double scale = 0;
    for (auto& p : poly) scale = std::max(scale, std::abs(p - poly[0]));
    for (size_t k = 2; k < n; ++k) {
        cplx a = poly[0], b = poly[1], c = poly[k];
        double d = 2 * cross(b - a, c - a);
        if (std::abs(d) < 1e-9 * scale * scale) continue;
        double nb = std::norm(b - a), nc = std::norm(c - a);
        cplx center = a + cplx((c - a).imag() * nb - (b - a).imag() * nc,
                               (b - a).real() * nc - (c - a).real() * nb) / d;
        double r = std::abs(center - a);
        bool ok = true;
        for (auto& p : poly)
            if (std::abs(std::abs(p - center) - r) > 1e-9 * scale) ok = false;
        if (ok && point_in_polygon(center, poly)) {
            for (size_t i = 0; i < n; ++i)
                if (dist_to_segment(center, poly[i], poly[(i + 1) % n]) < 1e-9 * scale) ok = false;
            if (ok) return center;
        }
        break;
    }
    double area = 0;
    cplx acc = 0;
    for (size_t i = 0; i < n; ++i) {
        cplx a = poly[i], b = poly[(i + 1) % n];
        double w = cross(a, b);
        area += w;
        acc += (a + b) * w;
    }
    if (std::abs(area) < 1e-14 * scale * scale) {
        cplx s = 0;
        for (auto& p : poly) s += p;
        return s / double(n);
    }
    return acc / (3.0 * area);
}

} // namespace

bool segments_touch(cplx a, cplx b, cplx c, cplx d) {
    const double eps = 1e-12;
    int o1 = orient(a, b, c, eps), o2 = orient(a, b, d, eps);
    int o3 = orient(c, d, a, eps), o4 = orient(c, d, b, eps);
    if (o1 * o2 < 0 && o3 * o4 < 0) return true;
    if (o1 == 0 && on_segment(a, b, c)) return true;
    if (o2 == 0 && on_segment(a, b, d)) return true;
    if (o3 == 0 && on_segment(c, d, a)) return true;
    if (o4 == 0 && on_segment(c, d, b)) return true;
    return false;
}

PlanarMap PlanarMap::build(std::vector<cplx> positions, std::vector<std::array<int, 2>> edges,
                           std::vector<BoundaryArc> arcs) {
    PlanarMap m;
    const int V = static_cast<int>(positions.size());
    const int E = static_cast<int>(edges.size());
    if (V == 0) throw InputError("map has no vertices");
    for (auto& p : positions)
        if (!std::isfinite(p.real()) || !std::isfinite(p.imag()))
            throw InputError("non-finite vertex position");
    std::set<std::pair<int, int>> seen;
    for (int e = 0; e < E; ++e) {
        auto [a, b] = edges[e];
        if (a < 0 || b < 0 || a >= V || b >= V)
            throw InputError("edge " + std::to_string(e) + " has an endpoint out of range");
        if (a == b) throw InputError("edge " + std::to_string(e) + " is a loop");
        if (!seen.insert({std::min(a, b), std::max(a, b)}).second)
            throw InputError("edge " + std::to_string(e) + " duplicates another edge");
        if (std::abs(positions[a] - positions[b]) == 0.0)
            throw GeometryError("edge " + std::to_string(e) + " has zero length");
    }
    m.pos_ = std::move(positions);
    m.edges_ = std::move(edges);

    // connectivity
    {
        std::vector<std::vector<int>> adj(V);
        for (auto& e : m.edges_) {
            adj[e[0]].push_back(e[1]);
            adj[e[1]].push_back(e[0]);
        }
        std::vector<char> vis(V, 0);
        std::vector<int> st{0};
        vis[0] = 1;
        int cnt = 1;
        while (!st.empty()) {
            int v = st.back();
            st.pop_back();
            for (int w : adj[v])
                if (!vis[w]) { vis[w] = 1; ++cnt; st.push_back(w); }
        }
        if (cnt != V) throw EmbeddingError("graph is not connected");
    }

    // crossings: sweep over x-extents
    {
        std::vector<int> order(E);
        std::iota(order.begin(), order.end(), 0);
        auto minx = [&](int e) { return std::min(m.pos_[m.edges_[e][0]].real(), m.pos_[m.edges_[e][1]].real()); };
        auto maxx = [&](int e) { return std::max(m.pos_[m.edges_[e][0]].real(), m.pos_[m.edges_[e][1]].real()); };
        std::sort(order.begin(), order.end(), [&](int a, int b) { return minx(a) < minx(b); });
        for (int i = 0; i < E; ++i) {
            int e = order[i];
            double lim = maxx(e) + 1e-12;
            for (int j = i + 1; j < E && minx(order[j]) <= lim; ++j) {
                int f = order[j];
                auto [a, b] = m.edges_[e];
                auto [c, d] = m.edges_[f];
                int shared = (a == c) + (a == d) + (b == c) + (b == d);
                if (shared == 0) {
                    if (segments_touch(m.pos_[a], m.pos_[b], m.pos_[c], m.pos_[d]))
                        throw EmbeddingError("edges " + std::to_string(e) + " and " + std::to_string(f) + " intersect");
                } else {
                    int p = (a == c || a == d) ? a : b;
                    int q1 = (p == a) ? b : a;
                    int q2 = (p == c) ? d : c;
                    cplx u = m.pos_[q1] - m.pos_[p], w = m.pos_[q2] - m.pos_[p];
                    if (std::abs(cross(u, w)) <= 1e-12 * std::abs(u) * std::abs(w) && dot(u, w) > 0)
                        throw EmbeddingError("edges " + std::to_string(e) + " and " + std::to_string(f) + " overlap");
                }
            }
        }
    }

    // rotation system
    const int H = 2 * E;
    m.out_.assign(V, {});
    for (int h = 0; h < H; ++h) m.out_[m.tail(h)].push_back(h);
    m.rot_next_.assign(H, -1);
    m.rot_prev_.assign(H, -1);
    for (int v = 0; v < V; ++v) {
        auto& o = m.out_[v];
        std::sort(o.begin(), o.end(), [&](int a, int b) {
            double aa = m.angle(a), ab = m.angle(b);
            if (aa != ab) return aa < ab;
            return a < b;
        });
        for (size_t k = 0; k < o.size(); ++k) {
            m.rot_next_[o[k]] = o[(k + 1) % o.size()];
            m.rot_prev_[o[k]] = o[(k + o.size() - 1) % o.size()];
        }
    }
    m.next_.assign(H, -1);
    for (int h = 0; h < H; ++h) m.next_[h] = m.rot_prev_[twin(h)];

    // faces
    m.face_.assign(H, -1);
    for (int h = 0; h < H; ++h) {
        if (m.face_[h] >= 0) continue;
        int f = static_cast<int>(m.face_start_.size());
        m.face_start_.push_back(h);
        int g = h;
        do {
            m.face_[g] = f;
            g = m.next_[g];
        } while (g != h);
    }
    if (E == 0) m.face_start_.push_back(-1);
    const int F = m.num_faces();
    if (V - E + F != 2) throw EmbeddingError("Euler characteristic check failed (V - E + F != 2)");

    m.outer_ = 0;
    double best = 1e300;
    for (int f = 0; f < F; ++f) {
        double a = m.face_signed_area(f);
        if (a < best) { best = a; m.outer_ = f; }
    }

    m.face_center_.assign(F, cplx(0, 0));
    for (int f = 0; f < F; ++f) {
        if (f == m.outer_) continue;
        std::vector<cplx> poly;
        for (int h : m.face_walk(f)) poly.push_back(m.pos_[m.tail(h)]);
        m.face_center_[f] = polygon_center(poly);
    }

    // boundary walk, counterclockwise around the domain
    if (E > 0) {
        auto ow = m.face_walk(m.outer_);
        for (auto it = ow.rbegin(); it != ow.rend(); ++it) m.boundary_walk_.push_back(twin(*it));
    }
    {
        std::set<int> vs, es;
        for (int h : m.boundary_walk_) {
            if (!vs.insert(m.tail(h)).second) m.boundary_simple_ = false;
            if (!es.insert(edge_of(h)).second) m.boundary_simple_ = false;
        }
    }

    // arcs
    m.edge_arc_.assign(E, -1);
    const int B = static_cast<int>(m.boundary_walk_.size());
    if (B == 0) {
        if (!arcs.empty()) {
            for (auto& a : arcs)
                if (!a.edges.empty()) throw BoundaryError("map has no boundary edges but arcs were given");
        }
        return m;
    }
    if (arcs.empty()) {
        BoundaryArc a;
        a.type = ArcType::Wired;
        std::set<int> es;
        for (int h : m.boundary_walk_)
            if (es.insert(edge_of(h)).second) a.edges.push_back(edge_of(h));
        arcs.push_back(a);
    }
    bool any_wired = false;
    for (auto& a : arcs) {
        if (a.edges.empty()) throw BoundaryError("empty boundary arc");
        if (a.type == ArcType::Wired) any_wired = true;
    }
    if (!any_wired) throw BoundaryError("at least one wired boundary arc is required");
    if (!m.boundary_simple_) {
        if (arcs.size() != 1 || arcs[0].type != ArcType::Wired)
            throw BoundaryError("outer boundary is not a simple cycle; only a single wired arc is supported");
        for (int e : arcs[0].edges) m.edge_arc_.at(e) = 0;
        for (int h : m.boundary_walk_)
            if (m.edge_arc_[edge_of(h)] < 0) throw BoundaryError("boundary edge missing from arcs");
        m.arcs_ = std::move(arcs);
        return m;
    }
    std::vector<int> walk_pos(E, -1);
    for (int i = 0; i < B; ++i) walk_pos[edge_of(m.boundary_walk_[i])] = i;
    for (size_t ai = 0; ai < arcs.size(); ++ai) {
        for (int e : arcs[ai].edges) {
            if (e < 0 || e >= E) throw InputError("arc edge index out of range");
            if (walk_pos[e] < 0) throw BoundaryError("arc edge " + std::to_string(e) + " is not on the outer boundary");
            if (m.edge_arc_[e] >= 0) throw BoundaryError("boundary edge " + std::to_string(e) + " listed twice");
            m.edge_arc_[e] = static_cast<int>(ai);
        }
    }
    for (int i = 0; i < B; ++i)
        if (m.edge_arc_[edge_of(m.boundary_walk_[i])] < 0)
            throw BoundaryError("boundary edge " + std::to_string(edge_of(m.boundary_walk_[i])) + " not covered by arcs");
    for (size_t ai = 0; ai < arcs.size(); ++ai) {
        int starts = 0, start = -1;
        for (int i = 0; i < B; ++i) {
            int e = edge_of(m.boundary_walk_[i]);
            int ep = edge_of(m.boundary_walk_[(i + B - 1) % B]);
            if (m.edge_arc_[e] == int(ai) && m.edge_arc_[ep] != int(ai)) { ++starts; start = i; }
        }
        if (arcs.size() == 1) { starts = 1; start = 0; }
        if (starts != 1) throw BoundaryError("arc " + std::to_string(ai) + " is not contiguous along the boundary");
        std::vector<int> ordered;
        for (int k = 0; k < int(arcs[ai].edges.size()); ++k)
            ordered.push_back(edge_of(m.boundary_walk_[(start + k) % B]));
        arcs[ai].edges = ordered;
    }
    m.arcs_ = std::move(arcs);
    return m;
}

std::vector<int> PlanarMap::face_walk(int f) const {
    std::vector<int> w;
    int h0 = face_start_[f];
    if (h0 < 0) return w;
    int h = h0;
    do {
        w.push_back(h);
        h = next_[h];
    } while (h != h0);
    return w;
}

double PlanarMap::face_signed_area(int f) const {
    double a = 0;
    for (int h : face_walk(f)) a += cross(pos_[tail(h)], pos_[head(h)]);
    return 0.5 * a;
}

} // namespace isingkit
