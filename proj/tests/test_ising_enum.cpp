#include <doctest.h>

#include <random>

#include "isingkit/errors.hpp"
#include "isingkit/generators.hpp"
#include "isingkit/ising_enum.hpp"
#include "oracles.hpp"

using namespace isingkit;

namespace {

RandomGraph sample(std::mt19937_64& rng, bool mixed) {
    RandomMapOptions o;
    o.max_edges = 14;
    o.mixed_boundary = mixed;
    RandomGraph g = random_graph(rng, o);
    return g;
}

} // namespace

TEST_CASE("partition function against spin sums") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 30; ++t) {
        RandomGraph g = sample(rng, t % 2);
        DualPair dp(g.map);
        g.weights.normalize(dp);
        IsingEnumerator en(dp, g.weights);
        double z = oracle::Z_low(dp, g.weights);
        CHECK(oracle::rel_err(en.Z(), z) < 1e-12);
        CHECK(oracle::rel_err(oracle::Z_high(dp, g.weights), z) < 1e-10);
    }
}

TEST_CASE("exact rational sum matches") {
    PlanarMap m = grid_map(3, 3);
    DualPair dp(m);
    IsingWeights w = IsingWeights::uniform(m, 0.25);
    IsingEnumerator en(dp, w);
    Rational z = en.Z_exact();
    CHECK(static_cast<double>(z) == doctest::Approx(en.Z()).epsilon(1e-14));
}

TEST_CASE("spin correlators against the oracle") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 15; ++t) {
        RandomGraph g = sample(rng, t % 2);
        DualPair dp(g.map);
        g.weights.normalize(dp);
        IsingEnumerator en(dp, g.weights);
        std::uniform_int_distribution<int> C(0, dp.num_circ() - 1);
        for (int k = 0; k < 5; ++k) {
            std::vector<int> s{C(rng), C(rng)};
            if (s[0] == s[1]) continue;
            CHECK(en.spin_correlator(s) == doctest::Approx(oracle::spin_product(dp, g.weights, s)).epsilon(1e-10));
        }
    }
}

TEST_CASE("disorder correlators do not depend on the lines") {
    PlanarMap m = grid_map(4, 4);
    DualPair dp(m);
    std::mt19937_64 rng(9);
    IsingWeights w = IsingWeights::uniform(m, 0.4);
    IsingEnumerator en(dp, w);
    for (int b0 = 0; b0 < dp.num_bullet(); b0 += 3)
        for (int b1 = b0 + 1; b1 < dp.num_bullet(); b1 += 4) {
            double v = en.disorder_correlator({b0, b1});
            EdgeSet t = en.tjoin({b0, b1});
            CHECK(en.disorder_correlator({b0, b1}, t.edges()) == doctest::Approx(v).epsilon(1e-12));
            CHECK(v > 0);
            CHECK(v <= 1);
        }
}

TEST_CASE("corner correlators are antisymmetric") {
    PlanarMap m = grid_map(3, 4);
    DualPair dp(m);
    IsingWeights w = IsingWeights::uniform(m, kCriticalSquareX);
    IsingEnumerator en(dp, w);
    for (int c = 0; c < dp.num_corners(); c += 3)
        for (int d = c + 1; d < dp.num_corners(); d += 5) {
            if (dp.corner(c).vb == dp.corner(d).vb) continue;
            double a = en.correlator({{}, {}, {c, d}}), b = en.correlator({{}, {}, {d, c}});
            CHECK(a == doctest::Approx(-b).epsilon(1e-12));
        }
}

TEST_CASE("boundary magnetization is positive and below one") {
    PlanarMap m = grid_map(4, 4);
    DualPair dp(m);
    IsingEnumerator en(dp, IsingWeights::uniform(m, 0.5));
    for (int c = 0; c < dp.num_circ(); ++c) {
        double s = en.spin_correlator({c});
        if (dp.circ_is_wired(c)) CHECK(s == doctest::Approx(1.0));
        else CHECK((s > 0 && s < 1));
    }
}

TEST_CASE("cycle space bound is enforced") {
    PlanarMap m = grid_map(7, 7);
    DualPair dp(m);
    EnumOptions o;
    o.max_cycle_dim = 10;
    CHECK_THROWS_AS(IsingEnumerator(dp, IsingWeights::uniform(m, 0.4), o), SizeError);
}
