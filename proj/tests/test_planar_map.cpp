#include <doctest.h>

#include <random>

#include "isingkit/dual_pair.hpp"
#include "isingkit/errors.hpp"
#include "isingkit/generators.hpp"
#include "isingkit/graph_io.hpp"

using namespace isingkit;

TEST_CASE("grid map counts and Euler") {
    PlanarMap m = grid_map(4, 3);
    CHECK(m.num_vertices() == 12);
    CHECK(m.num_edges() == 3 * 3 + 4 * 2);
    CHECK(m.num_vertices() - m.num_edges() + m.num_faces() == 2);
    CHECK(m.boundary_walk().size() == 10);
    CHECK(m.boundary_is_simple());
    for (int f = 0; f < m.num_faces(); ++f)
        if (f != m.outer_face()) CHECK(m.face_signed_area(f) > 0);
}

TEST_CASE("half-edge structure is consistent") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 20; ++t) {
        RandomGraph g = random_graph(rng);
        const PlanarMap& m = g.map;
        for (int h = 0; h < m.num_half_edges(); ++h) {
            CHECK(m.tail(m.next(h)) == m.head(h));
            CHECK(m.face(m.next(h)) == m.face(h));
            CHECK(m.head(PlanarMap::twin(h)) == m.tail(h));
        }
        CHECK(m.num_vertices() - m.num_edges() + m.num_faces() == 2);
    }
}

TEST_CASE("crossing edges are rejected") {
    std::vector<cplx> p{{0, 0}, {1, 1}, {1, 0}, {0, 1}};
    CHECK_THROWS_AS(PlanarMap::build(p, {{0, 1}, {2, 3}}), Error);
    CHECK(segments_touch({0, 0}, {1, 1}, {1, 0}, {0, 1}));
    CHECK_FALSE(segments_touch({0, 0}, {1, 0}, {0, 1}, {1, 1}));
}

TEST_CASE("side patterns give alternating arcs") {
    PlanarMap m = grid_map(3, 4, 1.0, sides_from_string("quad"));
    REQUIRE(m.arcs().size() == 4);
    int wired = 0;
    for (auto& a : m.arcs()) wired += a.type == ArcType::Wired;
    CHECK(wired == 2);
    int on_arcs = 0;
    for (auto& a : m.arcs()) on_arcs += static_cast<int>(a.edges.size());
    CHECK(on_arcs == static_cast<int>(m.boundary_walk().size()));
}

TEST_CASE("dual pair bookkeeping") {
    PlanarMap m = grid_map(4, 4, 1.0, sides_from_string("mixed"));
    DualPair dp(m);
    int free_edges = 0;
    for (int e = 0; e < m.num_edges(); ++e) free_edges += dp.edge_is_free(e);
    CHECK(dp.num_quads() == m.num_edges() - free_edges);
    for (int z = 0; z < dp.num_quads(); ++z) {
        const Quad& q = dp.quad(z);
        CHECK(dp.quad_of_edge(q.edge) == z);
        for (int p = 0; p < 2; ++p)
            for (int s = 0; s < 2; ++s) {
                const Corner& c = dp.corner(q.corner[p][s]);
                CHECK(c.vb == q.vb[p]);
                CHECK(c.vc == q.vc[s]);
            }
    }
    int wired = 0;
    for (int c = 0; c < dp.num_circ(); ++c) wired += dp.circ_is_wired(c);
    CHECK(wired > 0);
    CHECK(dp.num_circ() == m.num_faces() - 1 + wired);
}

TEST_CASE("graph JSON round trip") {
    std::mt19937_64 rng(11);
    RandomMapOptions o;
    o.mixed_boundary = true;
    RandomGraph g = random_graph(rng, o);
    g.weights.normalize(DualPair(g.map));
    auto j = graph_to_json(g.map, g.weights, {{"seed", 11}});
    Graph back = graph_from_json(j);
    CHECK(back.map.num_edges() == g.map.num_edges());
    CHECK(back.map.arcs().size() == g.map.arcs().size());
    for (int e = 0; e < g.map.num_edges(); ++e) CHECK(back.weights.x[e] == doctest::Approx(g.weights.x[e]));
    CHECK_THROWS_AS(graph_from_json(nlohmann::json{{"vertices", 1}}), Error);
}
