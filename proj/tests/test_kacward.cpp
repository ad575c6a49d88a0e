#include <doctest.h>

#include <random>

#include "isingkit/generators.hpp"
#include "isingkit/kacward.hpp"
#include "oracles.hpp"

using namespace isingkit;

TEST_CASE("Pfaffian squares to the determinant") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> N;
    for (int n : {2, 4, 6, 10}) {
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                A(i, j) = N(rng);
                A(j, i) = -A(i, j);
            }
        double pf = pfaffian(A);
        CHECK(pf * pf == doctest::Approx(A.determinant()).epsilon(1e-10));
    }
    Eigen::MatrixXd a(4, 4);
    a << 0, 1, 2, 3, -1, 0, 4, 5, -2, -4, 0, 6, -3, -5, -6, 0;
    CHECK(pfaffian(a) == doctest::Approx(1 * 6 - 2 * 5 + 3 * 4));
}

TEST_CASE("det of the Kac-Ward matrix is Z squared") {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 25; ++t) {
        RandomMapOptions o;
        o.max_edges = 16;
        o.mixed_boundary = t % 2;
        RandomGraph g = random_graph(rng, o);
        DualPair dp(g.map);
        g.weights.normalize(dp);
        double z = oracle::Z_low(dp, g.weights);
        cplx d = KacWard(g.map, g.weights).det();
        CHECK(std::abs(d - z * z) <= 1e-10 * z * z);
    }
}

TEST_CASE("real antisymmetric form") {
    PlanarMap m = grid_map(3, 4);
    DualPair dp(m);
    KacWardReport r = verify_kac_ward(dp, IsingWeights::uniform(m, 0.3));
    CHECK(r.rel_err < 1e-12);
    CHECK(r.khat_antisym < 1e-12);
    CHECK(r.khat_imag < 1e-12);
    CHECK(r.pf_ratio == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("fermions from the inverse match enumeration") {
    PlanarMap m = grid_map(4, 3, 1.0, sides_from_string("mixed"));
    DualPair dp(m);
    std::mt19937_64 rng(8);
    IsingWeights w = IsingWeights::uniform(m, 0.35);
    w.normalize(dp);
    IsingEnumerator en(dp, w);
    KacWardFermions kf(dp, w);
    int checked = 0;
    for (int c = 0; c < dp.num_corners(); c += 2)
        for (int d = c + 1; d < dp.num_corners(); d += 3) {
            if (!kf.resolvable(c, d)) continue;
            double e = en.correlator({{}, {}, {c, d}});
            CHECK(std::abs(kf.two_point(c, d) - e) <= 1e-10 * std::max(1.0, std::abs(e)));
            ++checked;
        }
    CHECK(checked > 10);
    CHECK(kf.fallback_count() == 0);
    std::vector<int> four;
    for (int c = 0; c < dp.num_corners() && four.size() < 4; ++c) {
        bool distinct = true;
        for (int d : four) distinct = distinct && dp.corner(c).vb != dp.corner(d).vb;
        if (distinct) four.push_back(c);
    }
    double e4 = en.correlator({{}, {}, four});
    CHECK(std::abs(kf.correlator(four) - e4) <= 1e-10);
}
