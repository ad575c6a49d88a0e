#include <doctest.h>

#include <cmath>
#include <random>

#include "isingkit/errors.hpp"
#include "isingkit/fk.hpp"
#include "isingkit/generators.hpp"
#include "oracles.hpp"

using namespace isingkit;

TEST_CASE("FK measure against direct cluster counting") {
    std::mt19937_64 rng(6);
    for (int t = 0; t < 10; ++t) {
        RandomMapOptions o;
        o.max_edges = 12;
        o.mixed_boundary = t % 2;
        RandomGraph g = random_graph(rng, o);
        DualPair dp(g.map);
        g.weights.normalize(dp);
        FKGraph fg(dp);
        FKExact ex = fk_exact(fg, g.weights);
        std::vector<double> ref = oracle::fk_distribution(dp, g.weights);
        REQUIRE(ex.prob.size() == ref.size());
        for (size_t m = 0; m < ref.size(); ++m) CHECK(std::abs(ex.prob[m] - ref[m]) < 1e-13);
        CHECK(ex.euler_defect == 0);
    }
}

TEST_CASE("critical weights make FK and loop weights proportional") {
    PlanarMap m = grid_map(4, 3);
    DualPair dp(m);
    FKExact ex = fk_exact(FKGraph(dp), IsingWeights::uniform(m, kCriticalSquareX));
    CHECK(ex.ratio_spread < 1e-12);
    FKExact off = fk_exact(FKGraph(dp), IsingWeights::uniform(m, 0.3));
    CHECK(off.ratio_spread > 1e-3);
}

TEST_CASE("rho") {
    CHECK(rho(0.0) == 0.0);
    CHECK(rho(1.0) == 1.0);
    CHECK(rho(0.5) == doctest::Approx(std::sqrt(2.0) - 1));
}

TEST_CASE("size and boundary guards") {
    PlanarMap m = grid_map(5, 5);
    DualPair dp(m);
    FKGraph g(dp);
    CHECK_THROWS_AS(enumerate_fk(g, [](uint64_t, const std::vector<char>&, const FKGraph::Counts&) {}), SizeError);
    PlanarMap small = grid_map(3, 3);
    DualPair ds(small);
    CHECK_THROWS_AS(crossing_exact(ds, IsingWeights::uniform(small, 0.4)), BoundaryError);
    MCOptions o;
    o.budget = 10;
    CHECK_THROWS_AS(cluster_mc(FKGraph(ds), IsingWeights::uniform(small, 0.4), 1,
                               [](const ClusterChain&, std::vector<double>& out) { out[0] = 0; }, o),
                    MCBudgetError);
}

TEST_CASE("Edwards-Sokal moves respect the coupling") {
    PlanarMap m = grid_map(4, 4, 1.0, sides_from_string("mixed"));
    DualPair dp(m);
    FKGraph g(dp);
    IsingWeights w = IsingWeights::uniform(m, 0.4);
    std::mt19937_64 rng(2);
    std::vector<int> spins(dp.num_circ(), 1);
    for (int c = 0; c < dp.num_circ(); ++c)
        if (!dp.circ_is_wired(c)) spins[c] = rng() & 1 ? 1 : -1;
    for (int t = 0; t < 50; ++t) {
        auto open = es_spin_to_fk(g, w, spins, rng);
        for (int z = 0; z < dp.num_quads(); ++z)
            if (open[z]) CHECK(spins[dp.quad(z).vc[0]] == spins[dp.quad(z).vc[1]]);
        spins = es_fk_to_spin(g, open, rng);
        auto lab = g.clusters(open);
        for (int c = 0; c < dp.num_circ(); ++c) {
            if (dp.circ_is_wired(c)) CHECK(spins[c] == 1);
            for (int d = 0; d < dp.num_circ(); ++d)
                if (lab[g.node(c)] == lab[g.node(d)]) CHECK(spins[c] == spins[d]);
        }
    }
}

TEST_CASE("crossing probabilities on quads") {
    PlanarMap m = grid_map(3, 3, 1.0, sides_from_string("quad"));
    DualPair dp(m);
    for (double x : {0.25, kCriticalSquareX, 0.6}) {
        CrossingResult c = crossing_exact(dp, IsingWeights::uniform(m, x));
        CHECK(c.mu_mu == doctest::Approx(c.p_fk).epsilon(1e-12));
        CHECK(c.complement_residual < 1e-12);
        CHECK((c.p_fk > 0 && c.p_fk < 1));
    }
    CrossingResult crit = crossing_exact(dp, IsingWeights::uniform(m, kCriticalSquareX));
    CHECK(crit.rho_residual < 1e-12);
    CHECK(crit.density_residual < 1e-12);
}

TEST_CASE("self-dual quads") {
    for (int n : {2, 3}) {
        PlanarMap m = self_dual_quad(n);
        DualPair dp(m);
        CHECK(verify_self_duality(dp).isomorphic);
        CrossingResult c = crossing_exact(dp, IsingWeights::uniform(m, kCriticalSquareX));
        CHECK(c.p_loops == doctest::Approx(0.5).epsilon(1e-10));
        CHECK(c.p_fk == doctest::Approx(kCriticalSquareX).epsilon(1e-10));
    }
    PlanarMap sq = grid_map(3, 3, 1.0, sides_from_string("quad"));
    DualPair ds(sq);
    CHECK_FALSE(verify_self_duality(ds).isomorphic);
}

TEST_CASE("parity of clusters gives spin correlations") {
    PlanarMap m = grid_map(3, 4);
    DualPair dp(m);
    std::mt19937_64 rng(17);
    IsingWeights w = IsingWeights::uniform(m, 0.5);
    std::uniform_real_distribution<double> U(0.2, 0.8);
    for (double& x : w.x) x = U(rng);
    w.normalize(dp);
    FKGraph g(dp);
    std::vector<int> inner;
    for (int c = 0; c < dp.num_circ(); ++c)
        if (!dp.circ_is_wired(c)) inner.push_back(c);
    std::vector<int> u{inner[0], inner.back()};
    CHECK(fk_parity_probability(g, w, u) == doctest::Approx(oracle::spin_product(dp, w, u)).epsilon(1e-12));
}

TEST_CASE("cluster chain reproduces a small expectation") {
    PlanarMap m = grid_map(3, 3);
    DualPair dp(m);
    IsingWeights w = IsingWeights::uniform(m, 0.5);
    FKGraph g(dp);
    int inner = -1;
    for (int c = 0; c < dp.num_circ() && inner < 0; ++c)
        if (!dp.circ_is_wired(c)) inner = c;
    MCOptions o;
    o.samples = 200000;
    o.seed = 3;
    auto est = cluster_mc(
        g, w, 1, [&](const ClusterChain& ch, std::vector<double>& out) { out[0] = ch.spins()[inner]; }, o);
    double exact = oracle::spin_product(dp, w, {inner});
    CHECK(std::abs(est[0].mean - exact) < 4 * est[0].stderr_);
    CHECK(est[0].samples == o.samples);
}
