#include "isingkit/generators.hpp"

#include <algorithm>
#include <cmath>

#include "isingkit/errors.hpp"

namespace isingkit {

SideTypes sides_from_string(const std::string& bc) {
    const auto W = ArcType::Wired, F = ArcType::Free;
    if (bc == "wired") return {W, W, W, W};
    // wired left/right, free bottom/top: the crossing-quad layout
    if (bc == "quad") return {F, W, F, W};
    if (bc == "free-top") return {W, W, F, W};
    if (bc == "free-bottom") return {F, W, W, W};
    if (bc == "mixed") return {W, F, W, W};
    throw InputError("unknown boundary pattern '" + bc + "' (wired, quad, free-top, free-bottom, mixed)");
}

PlanarMap grid_map(int nx, int ny, double h, SideTypes sides, cplx origin) {
    if (nx < 2 || ny < 2) throw InputError("grid needs at least 2x2 vertices");
    std::vector<cplx> pos;
    auto id = [&](int i, int j) { return j * nx + i; };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) pos.push_back(origin + cplx(i * h, j * h));
    std::vector<std::array<int, 2>> edges;
    std::vector<int> hid((nx - 1) * ny), vid(nx * (ny - 1));
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i + 1 < nx; ++i) {
            hid[j * (nx - 1) + i] = static_cast<int>(edges.size());
            edges.push_back({id(i, j), id(i + 1, j)});
        }
    for (int j = 0; j + 1 < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            vid[j * nx + i] = static_cast<int>(edges.size());
            edges.push_back({id(i, j), id(i, j + 1)});
        }
    // boundary edges counterclockwise from the bottom-left corner, by side
    std::vector<std::vector<int>> side_edges(4);
    for (int i = 0; i + 1 < nx; ++i) side_edges[0].push_back(hid[i]);
    for (int j = 0; j + 1 < ny; ++j) side_edges[1].push_back(vid[j * nx + nx - 1]);
    for (int i = nx - 2; i >= 0; --i) side_edges[2].push_back(hid[(ny - 1) * (nx - 1) + i]);
    for (int j = ny - 2; j >= 0; --j) side_edges[3].push_back(vid[j * nx]);
    std::vector<BoundaryArc> arcs;
    int first = 0;
    while (first < 4 && sides[first] == sides[(first + 3) % 4]) ++first;
    if (first == 4) {
        BoundaryArc a;
        a.type = sides[0];
        for (int s = 0; s < 4; ++s) a.edges.insert(a.edges.end(), side_edges[s].begin(), side_edges[s].end());
        arcs.push_back(a);
    } else {
        for (int k = 0; k < 4; ++k) {
            int s = (first + k) % 4;
            if (k == 0 || sides[s] != sides[(s + 3) % 4]) arcs.push_back({sides[s], {}});
            arcs.back().edges.insert(arcs.back().edges.end(), side_edges[s].begin(), side_edges[s].end());
        }
    }
    return PlanarMap::build(std::move(pos), std::move(edges), std::move(arcs));
}

PlanarMap cycle_map(int n) {
    if (n < 3) throw InputError("cycle needs at least 3 vertices");
    std::vector<cplx> pos;
    std::vector<std::array<int, 2>> edges;
    for (int k = 0; k < n; ++k) {
        pos.push_back(std::polar(1.0, 2 * M_PI * k / n));
        edges.push_back({k, (k + 1) % n});
    }
    return PlanarMap::build(std::move(pos), std::move(edges));
}

PlanarMap with_arcs(const PlanarMap& m, const std::vector<int>& starts, const std::vector<ArcType>& types) {
    const auto& bw = m.boundary_walk();
    const int B = static_cast<int>(bw.size());
    std::vector<BoundaryArc> arcs;
    for (size_t k = 0; k < starts.size(); ++k) {
        int s = starts[k], t = (k + 1 < starts.size()) ? starts[k + 1] : starts[0] + B;
        BoundaryArc a;
        a.type = types[k];
        for (int i = s; i < t; ++i) a.edges.push_back(PlanarMap::edge_of(bw[i % B]));
        arcs.push_back(a);
    }
    return PlanarMap::build(m.positions(), m.edges(), arcs);
}

RandomGraph random_graph(std::mt19937_64& rng, const RandomMapOptions& opt) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    static const std::vector<std::pair<int, int>> shapes{{2, 2}, {2, 3}, {3, 2}, {3, 3}, {2, 4}, {4, 2}, {3, 4}, {4, 3}, {4, 4}};
    std::vector<std::pair<int, int>> fit;
    for (auto [a, b] : shapes)
        if ((a - 1) * b + a * (b - 1) <= opt.max_edges) fit.push_back({a, b});
    if (fit.empty()) throw InputError("max_edges too small for a random grid map");
    auto [nx, ny] = fit[std::uniform_int_distribution<size_t>(0, fit.size() - 1)(rng)];
    int base = (nx - 1) * ny + nx * (ny - 1);

    std::vector<cplx> pos;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            pos.emplace_back(i + opt.jitter * (U(rng) - 0.5), j + opt.jitter * (U(rng) - 0.5));
    auto id = [&](int i, int j) { return j * nx + i; };
    std::vector<std::array<int, 2>> edges;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i + 1 < nx; ++i) edges.push_back({id(i, j), id(i + 1, j)});
    for (int j = 0; j + 1 < ny; ++j)
        for (int i = 0; i < nx; ++i) edges.push_back({id(i, j), id(i, j + 1)});
    int budget = opt.max_edges - base;
    for (int j = 0; j + 1 < ny && budget > 0; ++j)
        for (int i = 0; i + 1 < nx && budget > 0; ++i)
            if (U(rng) < opt.diagonal_prob) {
                if (U(rng) < 0.5) edges.push_back({id(i, j), id(i + 1, j + 1)});
                else edges.push_back({id(i + 1, j), id(i, j + 1)});
                --budget;
            }
    PlanarMap m = PlanarMap::build(pos, edges);
    // interior deletions (never bridges, never boundary edges)
    for (int e = m.num_edges() - 1; e >= 0; --e) {
        if (U(rng) >= opt.delete_prob) continue;
        if (m.is_boundary_edge(e)) continue;
        if (m.face(2 * e) == m.face(2 * e + 1)) continue;
        auto es = m.edges();
        es.erase(es.begin() + e);
        m = PlanarMap::build(m.positions(), es);
    }
    if (opt.mixed_boundary) {
        int B = static_cast<int>(m.boundary_walk().size());
        int narcs = std::uniform_int_distribution<int>(1, std::min(4, B))(rng);
        std::vector<int> cuts(B);
        for (int i = 0; i < B; ++i) cuts[i] = i;
        std::shuffle(cuts.begin(), cuts.end(), rng);
        cuts.resize(narcs);
        std::sort(cuts.begin(), cuts.end());
        std::vector<ArcType> types;
        for (int k = 0; k < narcs; ++k) types.push_back(k % 2 == 0 ? ArcType::Wired : ArcType::Free);
        if (narcs % 2 == 1 && narcs > 1) types.back() = ArcType::Free == types[0] ? ArcType::Wired : ArcType::Free;
        if (narcs > 1 && types.back() == types[0]) types.back() = ArcType::Free;
        m = with_arcs(m, cuts, types);
    }
    RandomGraph g{m, IsingWeights::uniform(m, 0.5)};
    std::uniform_real_distribution<double> X(opt.x_min, opt.x_max);
    for (auto& x : g.weights.x) x = X(rng);
    return g;
}

} // namespace isingkit
